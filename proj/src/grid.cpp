#include "wmlab/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace wmlab {

Grid::Grid(std::size_t n, double radius) : radius_(radius) {
  if (n < 9) throw GridTooSmall("grid needs at least 9 nodes");
  if (n % 2 == 0) throw std::invalid_argument("grid node count must be odd");
  if (!(radius > 0.0)) throw std::invalid_argument("grid radius must be positive");
  spacing_ = radius / static_cast<double>(n - 1);
  nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    nodes_[i] = radius * static_cast<double>(i) / static_cast<double>(n - 1);
  nodes_.back() = radius;
}

std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
  // Fornberg, "Generation of finite difference formulas on arbitrarily
  // spaced grids", Math. Comp. 51 (1988).
  const std::size_t n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

namespace {

struct Stencil {
  int first;  // offset of the first point relative to the target node
  std::vector<double> weights;
};

Stencil make_stencil(int first, int count, int order) {
  std::vector<double> offs(count);
  for (int k = 0; k < count; ++k) offs[k] = first + k;
  return {first, fd_weights(0.0, offs, order)};
}

// Stencils for one derivative order: centred interior, plus six-point
// one-sided closures on the last three nodes (and the first three when the
// field has no parity). Narrower closures for the second derivative excite a
// growing boundary mode in the evolution system.
struct StencilSet {
  Stencil centred;
  std::array<Stencil, 3> right;  // right[k] at node n-3+k
  std::array<Stencil, 3> left;   // left[k] at node k
};

const StencilSet &stencils(int order) {
  static const auto build = [](int m) {
    StencilSet s;
    s.centred = make_stencil(-2, 5, m);
    s.right = {make_stencil(-3, 6, m), make_stencil(-4, 6, m), make_stencil(-5, 6, m)};
    s.left = {make_stencil(0, 6, m), make_stencil(-1, 6, m), make_stencil(-2, 6, m)};
    return s;
  };
  static const StencilSet first = build(1);
  static const StencilSet second = build(2);
  return order == 1 ? first : second;
}

double parity_sign(Parity p) { return p == Parity::odd ? -1.0 : 1.0; }

template <typename T>
T ghost_value(const BasicRadialField<T> &f, long idx) {
  if (idx >= 0) return f[static_cast<std::size_t>(idx)];
  return parity_sign(f.parity()) * f[static_cast<std::size_t>(-idx)];
}

template <typename T>
BasicRadialField<T> apply_fd(const BasicRadialField<T> &f, int order) {
  const std::size_t n = f.size();
  if (n < 9) throw GridTooSmall("finite differences need at least 9 nodes");
  const StencilSet &s = stencils(order);
  const double scale = std::pow(f.grid().spacing(), -order);
  const Parity out_parity = order == 1 ? flip(f.parity()) : f.parity();
  BasicRadialField<T> out(f.grid_ptr(), out_parity);

  auto apply = [&](std::size_t i, const Stencil &st) {
    T acc{};
    for (std::size_t k = 0; k < st.weights.size(); ++k)
      acc += st.weights[k] * ghost_value(f, static_cast<long>(i) + st.first + static_cast<long>(k));
    return acc * scale;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (i + 3 >= n) {
      out[i] = apply(i, s.right[i + 3 - n]);
    } else if (i < 3 && f.parity() == Parity::none) {
      out[i] = apply(i, s.left[i]);
    } else {
      out[i] = apply(i, s.centred);
    }
  }
  // Parity forces exact zeros at the origin.
  if (out_parity == Parity::odd) out[0] = T{};
  return out;
}

}  // namespace

template <typename T>
BasicRadialField<T> derivative(const BasicRadialField<T> &f) {
  return apply_fd(f, 1);
}

template <typename T>
BasicRadialField<T> second_derivative(const BasicRadialField<T> &f) {
  return apply_fd(f, 2);
}

template <typename T>
T quadrature(const BasicRadialField<T> &f, int weight_power) {
  const std::size_t n = f.size();
  if (n % 2 == 0) throw std::invalid_argument("Simpson quadrature needs an odd node count");
  const Grid &g = f.grid();
  T acc{};
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double r = g.node(i);
    const double rk = weight_power == 0 ? 1.0 : std::pow(r, weight_power);
    acc += w * rk * f[i];
  }
  return acc * (g.spacing() / 3.0);
}

template <typename T>
T evaluate_at(const BasicRadialField<T> &f, double rho) {
  const Grid &g = f.grid();
  if (!(rho >= 0.0 && rho <= g.radius())) throw std::out_of_range("evaluation point outside the grid");
  const long n = static_cast<long>(g.size());
  const double h = g.spacing();
  long j = static_cast<long>(std::floor(rho / h));
  j = std::clamp(j, 0L, n - 2);
  long start = j - 1;
  if (f.parity() == Parity::none) start = std::max(start, 0L);
  start = std::min(start, n - 4);
  T acc{};
  for (long a = 0; a < 4; ++a) {
    const long ia = start + a;
    const double xa = static_cast<double>(ia) * h;
    double w = 1.0;
    for (long b = 0; b < 4; ++b) {
      if (b == a) continue;
      const double xb = static_cast<double>(start + b) * h;
      w *= (rho - xb) / (xa - xb);
    }
    if (w == 0.0) continue;
    acc += w * ghost_value(f, ia);
  }
  return acc;
}

RadialField real_part(const ComplexRadialField &f) {
  RadialField r(f.grid_ptr(), f.parity());
  for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i].real();
  return r;
}

RadialField imag_part(const ComplexRadialField &f) {
  RadialField r(f.grid_ptr(), f.parity());
  for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i].imag();
  return r;
}

ComplexRadialField to_complex(const RadialField &f) {
  ComplexRadialField r(f.grid_ptr(), f.parity());
  for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i];
  return r;
}

template RadialField derivative(const RadialField &);
template ComplexRadialField derivative(const ComplexRadialField &);
template RadialField second_derivative(const RadialField &);
template ComplexRadialField second_derivative(const ComplexRadialField &);
template double quadrature(const RadialField &, int);
template Complex quadrature(const ComplexRadialField &, int);
template double evaluate_at(const RadialField &, double);
template Complex evaluate_at(const ComplexRadialField &, double);

}  // namespace wmlab
