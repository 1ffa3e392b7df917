#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/differentiation/autodiff.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wmlab/cli.hpp"
#include "wmlab/norms.hpp"
#include "wmlab/profile.hpp"

namespace wmlab {

namespace {

using boost::math::differentiation::make_fvar;

// Closed forms in templated form so they can be differentiated exactly.
template <typename X>
X g1_form(X r) {
  return 1 / (1 + r * r);
}
template <typename X>
X gtilde1_form(X r) {
  return (12 * r * r * r * atanh(r) - 9 * r * r - 1) / (r * r * r * (r * r + 1));
}
template <typename X>
X psi0_form(X r) {
  return (atanh(r) - r) / (r * r * r);
}
template <typename X>
X psi1_form(X r) {
  return 1 / (r * r * r);
}

struct Jet {
  long double u, du, ddu;
};

template <typename F>
Jet jet(F f, long double r) {
  const auto y = f(make_fvar<long double, 2>(r));
  return {y.derivative(0), y.derivative(1), y.derivative(2)};
}

// Eigenvalue-1 spectral operator, with or without the potential.
long double lambda1_operator(const Jet &j, long double r, bool with_potential) {
  const long double q = 1 + r * r;
  const long double pot = with_potential ? 16 / (q * q) : 0;
  return (r * r - 1) * j.ddu + (6 * r - 4 / r) * j.du + (6 - pot) * j.u;
}

long double wronskian_weighted(const Jet &a, const Jet &b, long double r) {
  return (a.u * b.du - a.du * b.u) * r * r * r * r * (1 - r * r);
}

using CFn = std::function<Complex(double)>;

// Eighth-order central differences.
constexpr double kD1[] = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0, 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
constexpr double kD2[] = {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};

Complex central(const CFn &f, double x, double h, const double (&w)[9]) {
  Complex acc = 0.0;
  for (int k = 0; k < 9; ++k) acc += w[k] * f(x + (k - 4) * h);
  return acc;
}

Complex fd1(const CFn &f, double x, double h = 2e-3) { return central(f, x, h, kD1) / h; }
Complex fd2(const CFn &f, double x, double h = 5e-3) { return central(f, x, h, kD2) / (h * h); }

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

double max_order(const std::vector<double> &errors) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < errors.size(); ++k) worst = std::min(worst, std::log2(errors[k - 1] / errors[k]));
  return worst;
}

template <typename F>
long double integrate(F f, long double a, long double b) {
  return boost::math::quadrature::gauss_kronrod<long double, 61>::integrate(f, a, b, 15, 1e-18L);
}

double max_abs_diff(const RadialField &a, const RadialField &b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const RadialField &a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

}  // namespace

std::vector<Check> profile_checks(std::uint64_t seed) {
  std::vector<Check> out;
  constexpr double pi = std::numbers::pi;

  out.push_back(check_le("u_star_origin", "u*(T=1,t=0,r->0) = 2", std::abs(u_star(1, 0, 0) - 2.0), 1e-15));
  out.push_back(check_le("u_star_unit", "u*(T=1,t=0,r=1) = pi/2", std::abs(u_star(1, 0, 1) - pi / 2), 1e-15));
  out.push_back(check_le("u_star_shift", "u*(T=2,t=1,r=1) = pi/2", std::abs(u_star(2, 1, 1) - pi / 2), 1e-15));

  {
    const auto p0 = psi_star(0.0), p1 = psi_star(1.0);
    const double d = std::max({std::abs(p0.psi1_star - 2), std::abs(p0.psi2_star - 2),
                               std::abs(p1.psi1_star - pi / 2), std::abs(p1.psi2_star - 1)});
    out.push_back(check_le("psi_star_endpoints", "Psi*(0) = (2,2), Psi*(1) = (pi/2,1)", d, 1e-15));
    double m = 0.0;
    for (double r : linspace(0.0, 1.0, 1000)) {
      const auto p = psi_star(r);
      m = std::max(m, std::abs(p.psi2_star - p.psi1_star - r * psi1_star_derivative(r)));
    }
    out.push_back(check_le("static_identity", "psi2* - psi1* - rho psi1*' = 0", m, 1e-12));
  }

  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uu(-10.0, 10.0), rr(0.0, 5.0), nd(-1.0, 1.0);
    double m = 0.0;
    for (int k = 0; k < 1000; ++k) {
      std::array<double, 3> d{nd(rng), nd(rng), nd(rng)};
      const double len = std::hypot(d[0], d[1], d[2]);
      for (auto &c : d) c /= len;
      const auto v = corotational_embed(uu(rng), rr(rng), d);
      m = std::max(m, std::abs(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]) - 1.0));
    }
    out.push_back(check_le("embedding_unit_norm", "|U| = 1 on S^3", m, 1e-15));
    const auto o = corotational_embed(3.7, 0.0, {0, 0, 1});
    const auto e = corotational_embed(pi / 2, 1.0, {1, 0, 0});
    const double d = std::max({std::abs(o[0]), std::abs(o[1]), std::abs(o[2]), std::abs(o[3] - 1),
                               std::abs(e[0] - 1), std::abs(e[1]), std::abs(e[2]), std::abs(e[3])});
    out.push_back(check_le("embedding_values", "U(u,0) = (0,0,0,1), U(pi/2,1,e1) = e1", d, 1e-15));
  }

  {
    const auto g0 = eigenfunction_g(0.0), g1 = eigenfunction_g(1.0);
    const double d = std::max({std::abs(g0.first - 1), std::abs(g0.second - 2), std::abs(g1.first - 0.5),
                               std::abs(g1.second - 0.5)});
    out.push_back(check_le("eigenfunction_endpoints", "g(0) = (1,2), g(1) = (1/2,1/2)", d, 1e-15));
    double res = 0.0, agree = 0.0;
    for (double r : linspace(0.01, 0.99, 99)) {
      const auto j = jet([](auto x) { return g1_form(x); }, r);
      res = std::max(res, static_cast<double>(std::fabs(lambda1_operator(j, r, true))));
      agree = std::max(agree, std::abs(eigenfunction_g(r).first - static_cast<double>(j.u)));
    }
    out.push_back(check_le("g1_residual", "A_1 g1 = 0 on (0, 0.99]", res, 1e-12));
    out.push_back(check_le("g1_closed_form", "g1 = 1/(1+rho^2)", agree, 1e-15));
  }

  {
    double res = 0.0, agree = 0.0;
    for (double r : linspace(0.1, 0.9, 81)) {
      const auto j = jet([](auto x) { return gtilde1_form(x); }, r);
      res = std::max(res, static_cast<double>(std::fabs(lambda1_operator(j, r, true))));
      agree = std::max(agree, std::abs(gtilde1(r) / static_cast<double>(j.u) - 1.0));
    }
    out.push_back(check_le("gtilde1_residual", "A_1 gtilde1 = 0 on [0.1, 0.9]", res, 1e-10));
    out.push_back(check_le("gtilde1_closed_form", "gtilde1 = (12 rho^3 artanh rho - 9 rho^2 - 1)/(rho^3(rho^2+1))",
                           agree, 1e-13));
    out.push_back(check_le("gtilde1_half", "gtilde1(1/2) = -15.5267", std::abs(gtilde1(0.5) + 15.5267), 5e-5));
    double w = 0.0;
    for (double r : {0.2, 0.5, 0.8}) {
      const auto a = jet([](auto x) { return g1_form(x); }, r);
      const auto b = jet([](auto x) { return gtilde1_form(x); }, r);
      w = std::max(w, static_cast<double>(std::fabs(wronskian_weighted(a, b, r) - 3)));
    }
    out.push_back(check_le("wronskian_g1_gtilde1", "W(g1,gtilde1) rho^4 (1-rho^2) = 3", w, 1e-10));
  }

  {
    double res = 0.0, agree = 0.0;
    for (double r : linspace(0.1, 0.9, 81)) {
      const auto j = jet([](auto x) { return psi0_form(x); }, r);
      res = std::max(res, static_cast<double>(std::fabs(lambda1_operator(j, r, false))));
      const auto p = free_psi0_psi1(r);
      agree = std::max({agree, std::abs(p.first / static_cast<double>(j.u) - 1.0),
                        std::abs(p.second * r * r * r - 1.0)});
    }
    out.push_back(check_le("psi0_residual", "(rho^2-1)u'' + (6rho-4/rho)u' + 6u = 0 for psi0", res, 1e-10));
    out.push_back(check_le("psi0_psi1_closed_form", "psi0 = (artanh rho - rho)/rho^3, psi1 = rho^-3", agree, 1e-12));
    out.push_back(check_le("psi0_origin", "psi0(0) = 1/3", std::abs(free_psi0_psi1(0.0).first - 1.0 / 3.0), 1e-15));
    double w = 0.0;
    for (double r : {0.25, 0.5, 0.75}) {
      const auto a = jet([](auto x) { return psi0_form(x); }, r);
      const auto b = jet([](auto x) { return psi1_form(x); }, r);
      w = std::max(w, static_cast<double>(std::fabs(wronskian_weighted(a, b, r) + 1)));
    }
    out.push_back(check_le("wronskian_psi0_psi1", "W(psi0,psi1) rho^4 (1-rho^2) = -1", w, 1e-10));
  }

  {
    const Complex lam(0.5, 2.0);
    const CFn b1 = [&](double r) { return bessel_b(1, r, lam); };
    const CFn b2 = [&](double r) { return bessel_b(2, r, lam); };
    const double r = 0.3;
    const Complex w = b2(r) * fd1(b1, r) - fd1(b2, r) * b1(r);
    out.push_back(check_le("wronskian_b", "W(b2,b1) = i(1-lambda) at rho=0.3, lambda=1/2+2i",
                           std::abs(w - Complex(0, 1) * (1.0 - lam)), 1e-10));
    out.push_back(check_le("b1_origin", "b1(rho->0) = 0", std::abs(bessel_b(1, 1e-9, lam)), 1e-15));
    // b'' + ((2 lambda - lambda^2) - 2/artanh(rho)^2) / (1-rho^2)^2 b = 0.
    double res = 0.0;
    for (double s : linspace(0.2, 0.8, 13)) {
      const double q = (1 - s * s) * (1 - s * s);
      const double phi = arctanh(s);
      const Complex coeff = (2.0 * lam - lam * lam - 2.0 / (phi * phi)) / q;
      res = std::max(res, std::abs(fd2(b1, s) + coeff * b1(s)));
    }
    out.push_back(check_le("b1_residual", "b1 solves the Liouville-Green transformed equation", res, 1e-8));
  }

  {
    const Complex lam(0.5, 3.0);
    const CFn w1 = [&](double r) { return free_w(1, r, lam); };
    const CFn w2 = [&](double r) { return free_w(2, r, lam); };
    const double r = 0.5;
    const Complex w = w1(r) * fd1(w2, r) - fd1(w1, r) * w2(r);
    out.push_back(check_le("wronskian_w", "W(w1,w2) = 2(1-lambda) at rho=1/2, lambda=1/2+3i",
                           std::abs(w - 2.0 * (1.0 - lam)), 1e-10));
    double m = 0.0;
    for (double s : linspace(0.0, 0.99, 100)) m = std::max(m, std::abs(free_w(1, s, 1.0) - std::sqrt(1 - s * s)));
    out.push_back(check_le("w1_lambda1", "w1(rho, 1) = sqrt(1-rho^2)", m, 1e-15));
    double res = 0.0;
    for (double s : linspace(0.2, 0.8, 13)) {
      const double q = (1 - s * s) * (1 - s * s);
      res = std::max(res, std::abs(fd2(w2, s) + (2.0 * lam - lam * lam) / q * w2(s)));
    }
    out.push_back(check_le("w2_residual", "w'' + (2 lambda - lambda^2)/(1-rho^2)^2 w = 0", res, 1e-8));
  }

  {
    const double d = std::max({std::abs(potential_V(0) + 16), std::abs(potential_V(1) + 4),
                               std::abs(potential_VN(0) + 16), std::abs(potential_VN(1))});
    out.push_back(check_le("potential_endpoints", "V(0) = V_N(0) = -16, V(1) = -4, V_N(1) = 0", d, 1e-15));
    double m = 0.0;
    for (double r : linspace(0.0, 1.0, 101))
      m = std::max(m, std::abs(potential_VN(r) - potential_V(r) * (1 - r * r)));
    out.push_back(check_le("potential_identity", "V_N = V (1-rho^2)", m, 1e-14));
  }

  {
    double zero = 0.0;
    for (double r : linspace(0.0, 1.0, 101)) zero = std::max(zero, std::abs(nonlinearity_N(0.0, r)));
    out.push_back(check_le("N_zero", "N(0) = 0", zero, 0.0));
    out.push_back(check_le("N_origin", "N(1)(0) = -8 - 4/3", std::abs(nonlinearity_N(1.0, 0.0) + 28.0 / 3.0), 1e-12));
    double m = 0.0;
    for (double r : linspace(0.05, 1.0, 200))
      for (double u : linspace(-2.0, 2.0, 200))
        m = std::max(m, std::abs(nonlinearity_N_direct(u, r) - nonlinearity_N_taylor(u, r)));
    out.push_back(check_le("N_dual_form", "direct and Taylor forms of N agree", m, 1e-9));
  }
  return out;
}

std::vector<Check> norms_checks(std::uint64_t seed, std::size_t samples) {
  std::vector<Check> out;
  const auto grid = Grid::make(513);
  const auto constant = [&](double c) { return RadialField::sample(grid, [c](double) { return c; }); };
  const auto g = eigenmode_state(grid);

  {
    const StatePair one{0.0, constant(1.0), constant(0.0)};
    out.push_back(check_le("E1_constant", "E1((1,0),(1,0)) = 1", std::abs(energy_E1(one, one).real() - 1.0), 1e-12));
    const StatePair sq{0.0, constant(0.0), RadialField::sample(grid, [](double r) { return r * r; })};
    out.push_back(check_le("E2_quadratic", "E2((0,rho^2),(0,rho^2)) = 32/7 + 1",
                           std::abs(energy_E2(sq, sq).real() - 39.0 / 7.0), 1e-9));
    const auto ps = profile_state(grid);
    const long double oracle =
        integrate([](long double r) {
          const long double d = 2 / (r * (1 + r * r)) - 2 * std::atan(r) / (r * r);
          return d * d * r * r * r * r;
        }, 0.0L, 1.0L) +
        integrate([](long double r) { return 4 * r * r * r * r / ((1 + r * r) * (1 + r * r)); }, 0.0L, 1.0L) +
        std::numbers::pi_v<long double> * std::numbers::pi_v<long double> / 4;
    out.push_back(check_le("E1_profile", "E1(Psi*,Psi*) against adaptive quadrature",
                           std::abs(energy_E1(ps, ps).real() - static_cast<double>(oracle)), 1e-8));
  }

  {
    std::mt19937_64 rng(seed);
    double herm = 0.0, pos = 0.0;
    for (int k = 0; k < 100; ++k) {
      ComplexStatePair u, v;
      const auto field = [&]() {
        const Polynomial a = random_even_polynomial(rng), b = random_even_polynomial(rng);
        return ComplexRadialField::sample(grid, [&](double r) { return Complex(a(r), b(r)); });
      };
      u = {0.0, field(), field()};
      v = {0.0, field(), field()};
      for (auto e : {&energy_E1<Complex>, &energy_E2<Complex>}) {
        const Complex uv = e(u, v), vu = e(v, u), uu = e(u, u);
        herm = std::max(herm, std::abs(uv - std::conj(vu)) / (std::abs(uv) + 1.0));
        pos = std::max({pos, std::abs(uu.imag()) / (std::abs(uu) + 1.0), -uu.real()});
      }
    }
    out.push_back(check_le("energy_hermitian", "(u,v) = conj (v,u) for E1 and E2", herm, 1e-14));
    out.push_back(check_le("energy_positive", "(u,u) real and >= 0", pos, 1e-14));
  }

  {
    const auto r1 = dissipativity_check(EnergyForm::E1, samples, seed);
    const auto r2 = dissipativity_check(EnergyForm::E2, samples, seed);
    out.push_back(check_ge("dissipativity_E1", "Re(L0 u,u)_E1 <= 1/2 |u|^2_E1", r1.value, -1e-10));
    out.push_back(check_ge("dissipativity_E2", "Re(L0 u,u)_E2 <= -1/2 |u|^2_E2", r2.value, -1e-10));
    const double m1 = dissipativity_margin(EnergyForm::E1, g), m2 = dissipativity_margin(EnergyForm::E2, g);
    out.push_back(check_ge("dissipativity_g", "both margins strictly positive at u = g", std::min(m1, m2),
                           std::numeric_limits<double>::min()));
    const PolyState zero{Polynomial({0.0}), Polynomial({0.0})};
    out.push_back(check_le("dissipativity_zero", "u = 0 gives 0 <= 0",
                           std::max(std::abs(dissipativity_margin(EnergyForm::E1, zero)),
                                    std::abs(dissipativity_margin(EnergyForm::E2, zero))),
                           0.0));
  }

  {
    std::vector<double> errs;
    for (std::size_t n : {65, 129, 257, 513}) {
      const auto gg = eigenmode_state(Grid::make(n));
      const auto lg = apply_L(gg);
      errs.push_back(std::max(max_abs_diff(lg.psi1, gg.psi1), max_abs_diff(lg.psi2, gg.psi2)));
    }
    out.push_back(check_le("Lg_equals_g", "L g = g at n=513", errs.back(), 1e-7));
    out.push_back(check_ge("Lg_order", "L g - g converges at order >= 3.8", max_order(errs), 3.8));
    const double c = 1.7;
    const auto lc = apply_L0tilde(StatePair{0.0, constant(c), constant(c)});
    out.push_back(check_le("L0_constant", "L0 (c,c) = (0,-2c)",
                           std::max(max_abs(lc.psi1), max_abs_diff(lc.psi2, constant(-2 * c))), 1e-9));
    const auto ps = profile_state(grid);
    const double a = 0.7, b = -1.3;
    const StatePair comb{0.0, a * g.psi1 + b * ps.psi1, a * g.psi2 + b * ps.psi2};
    const auto lhs = apply_L0tilde(comb), lu = apply_L0tilde(g), lv = apply_L0tilde(ps);
    const double scale = std::max(max_abs(lhs.psi2), 1.0);
    const double d = std::max(max_abs_diff(lhs.psi1, a * lu.psi1 + b * lv.psi1),
                              max_abs_diff(lhs.psi2, a * lu.psi2 + b * lv.psi2)) / scale;
    // Rounding of the combined input is amplified by the h^-2 stencils.
    out.push_back(check_le("L0_linearity", "L0(au+bv) = a L0 u + b L0 v", d, 1e-9));
  }

  {
    const StatePair one{0.0, constant(1.0), constant(0.0)};
    out.push_back(check_le("sobolev_constant", "|(1,0)|_1 = 1/sqrt(5)",
                           std::abs(sobolev_norm(one, 1) - 1 / std::sqrt(5.0)), 1e-10));
    const double c = -3.25;
    const StatePair cg{0.0, c * g.psi1, c * g.psi2};
    double hom = 0.0;
    for (int level : {1, 2, 3})
      hom = std::max(hom, std::abs(sobolev_norm(cg, level) / (std::abs(c) * sobolev_norm(g, level)) - 1));
    hom = std::max(hom, std::abs(h32_proxy(cg) / (std::abs(c) * h32_proxy(g)) - 1));
    out.push_back(check_le("norm_homogeneity", "|c s| = |c| |s|", hom, 1e-12));

    std::mt19937_64 rng(seed + 1);
    double tri = 0.0;
    for (int k = 0; k < 100; ++k) {
      const auto make = [&]() {
        return sample_poly_state(grid, {random_even_polynomial(rng), random_even_polynomial(rng)});
      };
      const auto u = make(), v = make();
      const StatePair w{0.0, u.psi1 + v.psi1, u.psi2 + v.psi2};
      for (int level : {1, 2, 3})
        tri = std::max(tri, sobolev_norm(w, level) - sobolev_norm(u, level) - sobolev_norm(v, level));
      tri = std::max(tri, lp_norm(w.psi1, 10) - lp_norm(u.psi1, 10) - lp_norm(v.psi1, 10));
    }
    out.push_back(check_le("triangle_inequality", "|u+v| <= |u| + |v|", tri, 1e-12));

    const double z = h32_proxy(StatePair{0.0, constant(0.0), constant(0.0)});
    out.push_back(check_le("h32_zero", "proxy(0) = 0", z, 0.0));
    const double p = h32_proxy(g), lo = sobolev_norm(g, 1), hi = sobolev_norm(g, 2);
    out.push_back(check_ge("h32_between", "|g|_1 <= proxy(g) <= |g|_2", std::min(p - lo, hi - p), 0.0));

    const auto ratios = norm_equivalence_ratios(samples, seed, 513);
    out.push_back(check_le("norm_equivalence", "|s|_E1 / |s|_{H1xL2} within [1/C, C]",
                           std::max(ratios.hi, 1 / ratios.lo), 10.0));
  }

  {
    out.push_back(check_le("lp_constant", "|1|_10 = (1/5)^(1/10)",
                           std::abs(lp_norm(constant(1.0), 10) - std::pow(0.2, 0.1)), 1e-10));
    const auto r = RadialField::sample(grid, [](double x) { return x; });
    out.push_back(check_le("lp_linear", "|rho|_2 = (1/7)^(1/2)", std::abs(lp_norm(r, 2) - std::sqrt(1 / 7.0)), 1e-10));
    const auto f = RadialField::sample(grid, [](double x) { return psi_star(x).psi1_star - 2; });
    const long double oracle = std::pow(
        integrate([](long double x) {
          const long double v = x == 0 ? 0 : 2 * std::atan(x) / x - 2;
          return std::pow(std::fabs(v), 10.0L) * x * x * x * x;
        }, 0.0L, 1.0L),
        0.1L);
    out.push_back(check_le("lp_profile", "|psi1* - 2|_10 against adaptive quadrature",
                           std::abs(lp_norm(f, 10) - static_cast<double>(oracle)), 1e-8));
  }

  {
    const auto one = hardy_ratios(constant(1.0));
    out.push_back(check_le("hardy_constant", "|rho^-1 1|^2 = 1/3", std::abs(one.ratio_h1 - std::sqrt(5.0 / 3.0)), 1e-10));
    const auto sq = hardy_ratios(RadialField::sample(grid, [](double x) { return x * x; }));
    out.push_back(check_le("hardy_quadratic", "Hardy ratios of rho^2 finite", sq.max_ratio(),
                           std::numeric_limits<double>::max()));
    const auto h = hardy_checks(samples, seed, 513);
    const auto h2 = hardy_checks(samples, seed, 1025);
    out.push_back(check_le("hardy_bound", "max Hardy ratio < 50", h.max_ratio(), 50.0));
    out.push_back(check_le("hardy_stability", "Hardy ratio stable under doubling n",
                           std::abs(h2.max_ratio() / h.max_ratio() - 1), 0.1));
  }
  return out;
}

}  // namespace wmlab
