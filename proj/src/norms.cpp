#include "wmlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wmlab/profile.hpp"

namespace wmlab {

StatePair profile_state(const GridPtr &grid) {
  return {0.0, RadialField::sample(grid, [](double r) { return psi_star(r).psi1_star; }),
          RadialField::sample(grid, [](double r) { return psi_star(r).psi2_star; })};
}

StatePair eigenmode_state(const GridPtr &grid) {
  return {0.0, RadialField::sample(grid, [](double r) { return eigenfunction_g(r).first; }),
          RadialField::sample(grid, [](double r) { return eigenfunction_g(r).second; })};
}

namespace {

template <typename T>
T conj_value(const T &x) {
  if constexpr (std::is_same_v<T, Complex>)
    return std::conj(x);
  else
    return x;
}

// \int a conj(b) rho^k on the grid.
template <typename T>
Complex inner(const BasicRadialField<T> &a, const BasicRadialField<T> &b, int k) {
  BasicRadialField<T> prod(a.grid_ptr(), Parity::even);
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * conj_value(b[i]);
  return Complex(quadrature(prod, k));
}

template <typename T>
Complex boundary(const BasicRadialField<T> &a, const BasicRadialField<T> &b) {
  return Complex(a[a.size() - 1] * conj_value(b[b.size() - 1]));
}

}  // namespace

template <typename T>
BasicStatePair<T> apply_L0tilde(const BasicStatePair<T> &s) {
  const auto d1 = derivative(s.psi1);
  const auto d2 = second_derivative(s.psi1);
  const auto p2 = derivative(s.psi2);
  const Grid &g = s.grid();
  BasicStatePair<T> out{s.tau, BasicRadialField<T>(s.grid_ptr()), BasicRadialField<T>(s.grid_ptr())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i);
    const T sing = i == 0 ? 4.0 * d2[0] : (4.0 / r) * d1[i];
    out.psi1[i] = -r * d1[i] - s.psi1[i] + s.psi2[i];
    out.psi2[i] = d2[i] + sing - r * p2[i] - 2.0 * s.psi2[i];
  }
  return out;
}

template <typename T>
BasicStatePair<T> apply_L(const BasicStatePair<T> &s) {
  auto out = apply_L0tilde(s);
  const Grid &g = s.grid();
  for (std::size_t i = 0; i < g.size(); ++i) out.psi2[i] -= potential_V(g.node(i)) * s.psi1[i];
  return out;
}

template <typename T>
Complex energy_E1(const BasicStatePair<T> &u, const BasicStatePair<T> &v) {
  const auto du = derivative(u.psi1);
  const auto dv = derivative(v.psi1);
  return inner(du, dv, 4) + inner(u.psi2, v.psi2, 4) + boundary(u.psi1, v.psi1);
}

template <typename T>
Complex energy_E2(const BasicStatePair<T> &u, const BasicStatePair<T> &v) {
  const auto du = derivative(u.psi1), dv = derivative(v.psi1);
  const auto ddu = second_derivative(u.psi1), ddv = second_derivative(v.psi1);
  const auto du2 = derivative(u.psi2), dv2 = derivative(v.psi2);
  return 8.0 * inner(ddu, ddv, 4) + 32.0 * inner(du, dv, 2) + 8.0 * inner(du2, dv2, 4) +
         boundary(u.psi1, v.psi1) + boundary(u.psi2, v.psi2);
}

template StatePair apply_L0tilde(const StatePair &);
template ComplexStatePair apply_L0tilde(const ComplexStatePair &);
template StatePair apply_L(const StatePair &);
template ComplexStatePair apply_L(const ComplexStatePair &);
template Complex energy_E1(const StatePair &, const StatePair &);
template Complex energy_E1(const ComplexStatePair &, const ComplexStatePair &);
template Complex energy_E2(const StatePair &, const StatePair &);
template Complex energy_E2(const ComplexStatePair &, const ComplexStatePair &);

double sobolev_norm(const StatePair &s, int level) {
  if (level < 1 || level > 3) throw std::invalid_argument("sobolev level must be 1, 2 or 3");
  double acc = 0.0;
  RadialField d = s.psi1;
  for (int j = 0; j <= level; ++j) {
    acc += quadrature(d * d, 4);
    if (j < level) d = derivative(d);
  }
  RadialField e = s.psi2;
  for (int j = 0; j < level; ++j) {
    acc += quadrature(e * e, 4);
    if (j + 1 < level) e = derivative(e);
  }
  return std::sqrt(acc);
}

double lp_norm(const RadialField &f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  // Scale by the maximum so that large p does not underflow.
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  RadialField w(f.grid_ptr(), Parity::even);
  for (std::size_t i = 0; i < f.size(); ++i) w[i] = std::pow(std::abs(f[i]) / m, p);
  return m * std::pow(quadrature(w, 4), 1.0 / p);
}

double w1p_seminorm(const RadialField &f, double p) { return lp_norm(derivative(f), p); }

double h32_proxy(const StatePair &s) { return std::sqrt(sobolev_norm(s, 1) * sobolev_norm(s, 2)); }

PolyState apply_L0tilde(const PolyState &s) {
  const Polynomial d1 = s.u1.derivative();
  const Polynomial d2 = d1.derivative();
  const Polynomial p2 = s.u2.derivative();
  PolyState out;
  out.u1 = -1.0 * d1.shift_up(1) - s.u1 + s.u2;
  out.u2 = d2 + 4.0 * d1.divide_by_x() - p2.shift_up(1) - 2.0 * s.u2;
  return out;
}

double energy(EnergyForm form, const PolyState &u, const PolyState &v) {
  const Polynomial du = u.u1.derivative(), dv = v.u1.derivative();
  if (form == EnergyForm::E1)
    return (du * dv).moment(4) + (u.u2 * v.u2).moment(4) + u.u1(1.0) * v.u1(1.0);
  const Polynomial ddu = du.derivative(), ddv = dv.derivative();
  const Polynomial du2 = u.u2.derivative(), dv2 = v.u2.derivative();
  return 8.0 * (ddu * ddv).moment(4) + 32.0 * (du * dv).moment(2) + 8.0 * (du2 * dv2).moment(4) +
         u.u1(1.0) * v.u1(1.0) + u.u2(1.0) * v.u2(1.0);
}

double dissipativity_margin(EnergyForm form, const PolyState &u) {
  const double norm2 = energy(form, u, u);
  const double lhs = energy(form, apply_L0tilde(u), u);
  const double bound = form == EnergyForm::E1 ? 0.5 * norm2 : -0.5 * norm2;
  return bound - lhs;
}

double dissipativity_margin(EnergyForm form, const StatePair &u) {
  const auto e = form == EnergyForm::E1 ? &energy_E1<double> : &energy_E2<double>;
  const double norm2 = e(u, u).real();
  const double lhs = e(apply_L0tilde(u), u).real();
  const double bound = form == EnergyForm::E1 ? 0.5 * norm2 : -0.5 * norm2;
  return bound - lhs;
}

PropertyReport dissipativity_check(EnergyForm form, std::size_t samples, std::uint64_t seed,
                                   double tolerance) {
  if (samples == 0) throw std::invalid_argument("dissipativity_check needs at least one sample");
  std::mt19937_64 rng(seed);
  PropertyReport r;
  r.name = form == EnergyForm::E1 ? "dissipativity_E1" : "dissipativity_E2";
  r.samples = samples;
  r.seed = seed;
  r.value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    PolyState u;
    u.u1 = random_even_polynomial(rng);
    u.u2 = random_even_polynomial(rng);
    r.value = std::min(r.value, dissipativity_margin(form, u));
  }
  r.pass = r.value >= -tolerance;
  return r;
}

double HardyReport::max_ratio() const { return std::max({ratio_h1, ratio_h2, ratio_h2_d}); }

HardyReport hardy_ratios(const RadialField &f) {
  const RadialField d1 = derivative(f);
  const RadialField d2 = second_derivative(f);
  const double l2 = quadrature(f * f, 4);
  const double h1 = std::sqrt(l2 + quadrature(d1 * d1, 4));
  const double h2 = std::sqrt(l2 + quadrature(d1 * d1, 4) + quadrature(d2 * d2, 4));
  HardyReport r;
  r.samples = 1;
  r.ratio_h1 = std::sqrt(quadrature(f * f, 2)) / h1;
  r.ratio_h2 = std::sqrt(quadrature(f * f, 0)) / h2;
  r.ratio_h2_d = std::sqrt(quadrature(d1 * d1, 2)) / h2;
  return r;
}

HardyReport hardy_checks(std::size_t samples, std::uint64_t seed, std::size_t n) {
  if (samples == 0) throw std::invalid_argument("hardy_checks needs at least one sample");
  auto grid = Grid::make(n);
  std::mt19937_64 rng(seed);
  HardyReport out;
  out.samples = samples;
  out.seed = seed;
  for (std::size_t k = 0; k < samples; ++k) {
    const Polynomial p = random_even_polynomial(rng);
    const auto r = hardy_ratios(RadialField::sample(grid, [&](double x) { return p(x); }));
    out.ratio_h1 = std::max(out.ratio_h1, r.ratio_h1);
    out.ratio_h2 = std::max(out.ratio_h2, r.ratio_h2);
    out.ratio_h2_d = std::max(out.ratio_h2_d, r.ratio_h2_d);
  }
  return out;
}

StatePair sample_poly_state(const GridPtr &grid, const PolyState &p) {
  return {0.0, RadialField::sample(grid, [&](double x) { return p.u1(x); }),
          RadialField::sample(grid, [&](double x) { return p.u2(x); })};
}

RatioRange norm_equivalence_ratios(std::size_t samples, std::uint64_t seed, std::size_t n) {
  auto grid = Grid::make(n);
  std::mt19937_64 rng(seed);
  RatioRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t k = 0; k < samples; ++k) {
    PolyState p;
    p.u1 = random_even_polynomial(rng);
    p.u2 = random_even_polynomial(rng);
    const StatePair s = sample_poly_state(grid, p);
    const double ratio = std::sqrt(energy_E1(s, s).real()) / sobolev_norm(s, 1);
    r.lo = std::min(r.lo, ratio);
    r.hi = std::max(r.hi, ratio);
  }
  return r;
}

}  // namespace wmlab
