#include <algorithm>
#include <cmath>
#include <numeric>

#include "wmlab/gauss.hpp"
#include "wmlab/profile.hpp"
#include "wmlab/spectral.hpp"

namespace wmlab {

namespace {

// Quadrature node of the composite rule on [0, 1]. Cells are the grid
// intervals; the last cell is refined geometrically towards rho = 1 and closed
// by a Gauss-Jacobi cap whose weight t^beta is already folded into w.
struct QuadPoint {
  double rho;
  double t;
  double w;
  std::size_t cell;
  bool cap;
};

// Width of the Gauss-Jacobi cap: the cap carries mass ~ eps^(1+beta), pushed
// below 1e-16 where the exponent range allows.
double cap_width(double beta) {
  const double e = std::pow(1e-16, 1.0 / (1.0 + beta));
  return std::max(e, 1e-300);
}

std::vector<QuadPoint> build_panels(const Grid &g, std::size_t order, std::size_t gj_order, double beta) {
  if (std::abs(g.radius() - 1.0) > 0.0) throw std::invalid_argument("resolvents are computed on grids over [0, 1]");
  const QuadratureRule gl = gauss_legendre(order);
  const std::size_t n = g.size();
  std::vector<QuadPoint> pts;
  pts.reserve((n + 200) * order);
  for (std::size_t c = 0; c + 2 < n; ++c) {
    const double a = g.node(c), b = g.node(c + 1);
    for (std::size_t k = 0; k < order; ++k) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[k];
      pts.push_back({x, 1.0 - x, 0.5 * (b - a) * gl.weights[k], c, false});
    }
  }
  const std::size_t last = n - 2;
  const double eps = cap_width(beta);
  double hi = 1.0 - g.node(last);
  while (hi > eps) {
    const double lo = 0.5 * hi;
    for (std::size_t k = 0; k < order; ++k) {
      const double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[k];
      pts.push_back({1.0 - t, t, 0.5 * (hi - lo) * gl.weights[k], last, false});
    }
    hi = lo;
  }
  const QuadratureRule gj = gauss_jacobi(gj_order, 0.0, beta);
  const double scale = std::pow(0.5 * hi, 1.0 + beta);
  for (std::size_t k = 0; k < gj_order; ++k) {
    const double t = 0.5 * hi * (1.0 + gj.nodes[k]);
    pts.push_back({1.0 - t, t, scale * gj.weights[k], last, true});
  }
  return pts;
}

// t^p, omitting t^Re(p) on cap nodes where the rule supplies it.
Complex tpow(double t, Complex p, bool cap) {
  if (t == 0.0) return p == Complex(0.0) ? Complex(1.0) : Complex(0.0);
  const double lt = std::log(t);
  return cap ? std::exp(Complex(0.0, p.imag() * lt)) : std::exp(p * lt);
}

// Basis values at the grid nodes and quadrature points, evaluated in one sorted pass.
struct BasisSamples {
  std::vector<SpectralBasis::Values> nodes;
  std::vector<SpectralBasis::Values> quad;
};

BasisSamples sample_basis(const SpectralBasis &basis, const Grid &g, const std::vector<QuadPoint> &q) {
  const std::size_t n = g.size();
  std::vector<RadialPoint> all;
  all.reserve(n + q.size());
  for (std::size_t i = 0; i < n; ++i) all.push_back({g.node(i), 1.0 - g.node(i)});
  for (const auto &p : q) all.push_back({p.rho, p.t});
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return all[a].t > all[b].t; });
  std::vector<RadialPoint> sorted(all.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    sorted[k] = all[order[k]];
    // Keep rho monotone even where 1 - t rounds.
    if (k > 0) sorted[k].rho = std::max(sorted[k].rho, sorted[k - 1].rho);
  }
  // rho = 0 carries a singular u1; evaluate u0 there separately.
  const bool has_origin = !sorted.empty() && sorted.front().rho == 0.0;
  std::vector<SpectralBasis::Values> vals;
  if (has_origin) {
    std::vector<RadialPoint> rest(sorted.begin() + 1, sorted.end());
    vals = basis.at(rest);
    const auto zero = SeriesSolution::at_zero(basis.lambda(), 0, 0.1).eval_local(0.0);
    vals.insert(vals.begin(), SpectralBasis::Values{zero.first, zero.second, Complex(HUGE_VAL), Complex(HUGE_VAL)});
  } else {
    vals = basis.at(sorted);
  }
  BasisSamples out;
  out.nodes.resize(n);
  out.quad.resize(q.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t idx = order[k];
    if (idx < n)
      out.nodes[idx] = vals[k];
    else
      out.quad[idx - n] = vals[k];
  }
  return out;
}

void check_resolvent_lambda(Complex lambda, double lo, double hi) {
  if (!(lambda.real() > lo && lambda.real() <= hi + 1e-12))
    throw std::domain_error("lambda outside the half-strip where this resolvent form applies");
}

void check_not_eigenvalue(const SpectralBasis &basis, const SpectralOptions &opt) {
  if (std::abs(basis.E()) < opt.eigen_threshold)
    throw NearEigenvalue("lambda is too close to an eigenvalue for the resolvent");
}

}  // namespace

ComplexRadialField second_component(const ComplexRadialField &u1, const ComplexRadialField *f1, Complex lambda) {
  const ComplexRadialField du = derivative(u1);
  ComplexRadialField u2(u1.grid_ptr(), u1.parity());
  for (std::size_t i = 0; i < u1.size(); ++i) {
    u2[i] = (1.0 + lambda) * u1[i] + u1.grid().node(i) * du[i];
    if (f1) u2[i] -= (*f1)[i];
  }
  return u2;
}

ComplexRadialField resolvent_direct(const ComplexFn &f, Complex lambda, const GridPtr &grid,
                                    const SpectralOptions &opt) {
  check_resolvent_lambda(lambda, 0.0, 0.75);
  const Grid &g = *grid;
  const SpectralBasis basis(lambda, opt, true);
  check_not_eigenvalue(basis, opt);
  const auto q = build_panels(g, opt.panel_order, opt.gj_order, lambda.real() - 1.0);
  const BasisSamples bs = sample_basis(basis, g, q);
  const std::size_t n = g.size();
  std::vector<Complex> cell0(n - 1, 0.0), cell1(n - 1, 0.0);
  for (std::size_t k = 0; k < q.size(); ++k) {
    const auto &p = q[k];
    const double s4 = std::pow(p.rho, 4);
    const Complex weight = p.w * s4 * std::pow(Complex(1.0 + p.rho), lambda - 1.0) * tpow(p.t, lambda - 1.0, p.cap);
    const Complex fv = f(p.rho);
    cell0[p.cell] += weight * bs.quad[k].u0 * fv;
    cell1[p.cell] += weight * bs.quad[k].u1 * fv;
  }
  std::vector<Complex> I0(n, 0.0), I1(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) I0[i] = I0[i - 1] + cell0[i - 1];
  for (std::size_t i = n - 1; i-- > 0;) I1[i] = I1[i + 1] + cell1[i];
  ComplexRadialField out(grid, Parity::even);
  const Complex E = basis.E();
  for (std::size_t i = 0; i < n; ++i) {
    const auto &v = bs.nodes[i];
    const Complex a = i == 0 ? Complex(0.0) : v.u1 * I0[i];
    const Complex b = i == n - 1 ? Complex(0.0) : v.u0 * I1[i];
    out[i] = -(a + b) / E;
  }
  return out;
}

ComplexRadialField resolvent_direct(const ComplexRadialField &f, Complex lambda, const SpectralOptions &opt) {
  const ComplexFn fn = [&f](double rho) { return evaluate_at(f, std::min(rho, f.grid().radius())); };
  return resolvent_direct(fn, lambda, f.grid_ptr(), opt);
}

// After integrating (1 - s)^(lambda - 1) by parts in both halves of the Green's
// representation the boundary terms cancel, leaving
//   R(rho) = -1/(lambda E) [u1(rho) int_0^rho g0' t^lambda + u0(rho) int_rho^1 g1' t^lambda]
// with g_j = s^4 u_j f (1+s)^(lambda-1). Both integrals converge for Re lambda > -1.
ComplexRadialField resolvent_ibp(const ComplexFn &f, const ComplexFn &fprime, Complex lambda, const GridPtr &grid,
                                 const SpectralOptions &opt) {
  check_resolvent_lambda(lambda, -0.75 - 1e-12, 0.75);
  const Grid &g = *grid;
  const SpectralBasis basis(lambda, opt, true);
  check_not_eigenvalue(basis, opt);
  const auto q = build_panels(g, opt.panel_order, opt.gj_order, lambda.real());
  const BasisSamples bs = sample_basis(basis, g, q);
  const std::size_t n = g.size();
  std::vector<Complex> cell0(n - 1, 0.0), cell1(n - 1, 0.0);
  for (std::size_t k = 0; k < q.size(); ++k) {
    const auto &p = q[k];
    const double s = p.rho;
    const Complex opl = std::pow(Complex(1.0 + s), lambda - 1.0);
    const Complex fv = f(s), dfv = fprime(s);
    const Complex weight = p.w * tpow(p.t, lambda, p.cap);
    const double s3 = s * s * s, s4 = s3 * s;
    auto gprime = [&](Complex u, Complex du) {
      return opl * (4.0 * s3 * u * fv + s4 * du * fv + s4 * u * dfv + (lambda - 1.0) * s4 * u * fv / (1.0 + s));
    };
    const auto &v = bs.quad[k];
    cell0[p.cell] += weight * gprime(v.u0, v.du0);
    cell1[p.cell] += weight * gprime(v.u1, v.du1);
  }
  std::vector<Complex> I0(n, 0.0), I1(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) I0[i] = I0[i - 1] + cell0[i - 1];
  for (std::size_t i = n - 1; i-- > 0;) I1[i] = I1[i + 1] + cell1[i];
  ComplexRadialField out(grid, Parity::even);
  const Complex scale = -1.0 / (lambda * basis.E());
  for (std::size_t i = 0; i < n; ++i) {
    const auto &v = bs.nodes[i];
    const Complex a = i == 0 ? Complex(0.0) : v.u1 * I0[i];
    const Complex b = i == n - 1 ? Complex(0.0) : v.u0 * I1[i];
    out[i] = scale * (a + b);
  }
  return out;
}

ComplexRadialField resolvent_ibp(const ComplexRadialField &f, Complex lambda, const SpectralOptions &opt) {
  const ComplexRadialField df = derivative(f);
  const double R = f.grid().radius();
  const ComplexFn fn = [&f, R](double rho) { return evaluate_at(f, std::min(rho, R)); };
  const ComplexFn dfn = [&df, R](double rho) { return evaluate_at(df, std::min(rho, R)); };
  return resolvent_ibp(fn, dfn, lambda, f.grid_ptr(), opt);
}

RadialField lambda1_free_solve(const std::function<double(double)> &F1, const GridPtr &grid) {
  // u = psi0(rho) int_rho^1 s F1 + rho^-3 int_0^rho s^4 psi0(s) F1,
  // psi0 = (arctanh rho - rho) / rho^3.
  const Grid &g = *grid;
  const std::size_t n = g.size();
  const auto q = build_panels(g, 16, 32, 0.0);
  auto s4psi0 = [](double rho, double t) {
    if (rho < 0.5) return std::pow(rho, 4) * free_psi0_psi1(rho).first;
    return rho * (0.5 * std::log((1.0 + rho) / t) - rho);
  };
  std::vector<double> cell0(n - 1, 0.0), cell1(n - 1, 0.0);
  for (const auto &p : q) {
    const double F = F1(p.rho);
    cell0[p.cell] += p.w * s4psi0(p.rho, p.t) * F;
    cell1[p.cell] += p.w * p.rho * F;
  }
  std::vector<double> I0(n, 0.0), I1(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) I0[i] = I0[i - 1] + cell0[i - 1];
  for (std::size_t i = n - 1; i-- > 0;) I1[i] = I1[i + 1] + cell1[i];
  RadialField u(grid, Parity::even);
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = g.node(i);
    const double a = i == n - 1 ? 0.0 : free_psi0_psi1(rho).first * I1[i];
    const double b = i == 0 ? 0.0 : I0[i] / (rho * rho * rho);
    u[i] = a + b;
  }
  return u;
}

RadialField lambda1_free_solve(const RadialField &f1, const RadialField &f2) {
  const RadialField df1 = derivative(f1);
  RadialField F(f1.grid_ptr(), Parity::even);
  for (std::size_t i = 0; i < F.size(); ++i) F[i] = f2[i] + 3.0 * f1[i] + f1.grid().node(i) * df1[i];
  const double R = f1.grid().radius();
  return lambda1_free_solve([&F, R](double rho) { return evaluate_at(F, std::min(rho, R)); }, f1.grid_ptr());
}

}  // namespace wmlab
