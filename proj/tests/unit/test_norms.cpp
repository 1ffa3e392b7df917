#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wmlab/norms.hpp"
#include "wmlab/profile.hpp"

using namespace wmlab;
using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

namespace {

Polynomial poly(std::vector<double> c) { return Polynomial(std::move(c)); }

StatePair pair_of(const GridPtr &grid, std::function<double(double)> a, std::function<double(double)> b) {
  return {0.0, RadialField::sample(grid, a), RadialField::sample(grid, b)};
}

double max_abs(const RadialField &f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

double oracle(const std::function<double(double)> &f) { return GK::integrate(f, 0.0, 1.0, 15, 1e-15); }

}  // namespace

TEST_CASE("L0 on constants and linearity") {
  const auto grid = Grid::make(129);
  const auto c = pair_of(grid, [](double) { return 1.5; }, [](double) { return 1.5; });
  const auto r = apply_L0tilde(c);
  CHECK(max_abs(r.psi1) < 1e-13);
  CHECK(max_abs(r.psi2 - RadialField::sample(grid, [](double) { return -3.0; })) < 1e-9);

  const auto u = pair_of(grid, [](double x) { return std::cos(x); }, [](double x) { return x * x; });
  const auto v = pair_of(grid, [](double x) { return 1 / (1 + x * x); }, [](double x) { return std::exp(-x * x); });
  const double a = 0.7, b = -2.3;
  const StatePair w{0.0, a * u.psi1 + b * v.psi1, a * u.psi2 + b * v.psi2};
  const auto lw = apply_L0tilde(w), lu = apply_L0tilde(u), lv = apply_L0tilde(v);
  CHECK(max_abs(lw.psi1 - (a * lu.psi1 + b * lv.psi1)) < 1e-10);
  CHECK(max_abs(lw.psi2 - (a * lu.psi2 + b * lv.psi2)) < 1e-9);

  // Exact polynomial form: L0 of (rho^2, 0) is (-3 rho^2, 2 + 8) = (-3 rho^2, 10).
  const auto p = apply_L0tilde(PolyState{poly({0, 0, 1}), Polynomial()});
  CHECK(p.u1(0.4) == doctest::Approx(-3 * 0.16));
  CHECK(p.u2(0.4) == doctest::Approx(10.0));
}

TEST_CASE("full operator reproduces the unstable eigenpair") {
  auto err = [](std::size_t n) {
    const auto grid = Grid::make(n);
    const auto g = eigenmode_state(grid);
    const auto lg = apply_L(g);
    return std::max(max_abs(lg.psi1 - g.psi1), max_abs(lg.psi2 - g.psi2));
  };
  CHECK(err(513) < 1e-7);
  CHECK(std::log2(err(129) / err(257)) >= 3.8);
}

TEST_CASE("energy forms on exact examples") {
  const auto grid = Grid::make(513);
  const auto one = pair_of(grid, [](double) { return 1.0; }, [](double) { return 0.0; });
  CHECK(energy_E1(one, one).real() == doctest::Approx(1.0).epsilon(1e-14));
  const auto q = pair_of(grid, [](double) { return 0.0; }, [](double x) { return x * x; });
  // 8 * int (2 rho)^2 rho^4 + 1 = 32/7 + 1.
  CHECK(std::abs(energy_E2(q, q).real() - 39.0 / 7) < 1e-9);
  CHECK(energy(EnergyForm::E2, PolyState{Polynomial(), poly({0, 0, 1})}, PolyState{Polynomial(), poly({0, 0, 1})}) ==
        doctest::Approx(39.0 / 7).epsilon(1e-14));
  CHECK(energy(EnergyForm::E1, PolyState{poly({1}), Polynomial()}, PolyState{poly({1}), Polynomial()}) == 1.0);

  const auto p = profile_state(grid);
  const double e1 = oracle([](double r) {
                      const double d = psi1_star_derivative(r), s = psi_star(r).psi2_star;
                      return (d * d + s * s) * r * r * r * r;
                    }) +
                    psi_star(1.0).psi1_star * psi_star(1.0).psi1_star;
  CHECK(std::abs(energy_E1(p, p).real() - e1) < 1e-8);
}

TEST_CASE("energy forms are Hermitian and positive") {
  std::mt19937_64 rng(7);
  const auto grid = Grid::make(257);
  for (int k = 0; k < 50; ++k) {
    const PolyState a{random_even_polynomial(rng), random_even_polynomial(rng)};
    const PolyState b{random_even_polynomial(rng), random_even_polynomial(rng)};
    for (auto form : {EnergyForm::E1, EnergyForm::E2}) {
      CHECK(energy(form, a, b) == doctest::Approx(energy(form, b, a)).epsilon(1e-13));
      CHECK(energy(form, a, a) >= 0.0);
    }
    // Complex sampled states: (u, v) = conj (v, u).
    ComplexStatePair u{0.0, to_complex(sample_poly_state(grid, a).psi1), to_complex(sample_poly_state(grid, a).psi2)};
    ComplexStatePair v{0.0, to_complex(sample_poly_state(grid, b).psi1), to_complex(sample_poly_state(grid, b).psi2)};
    u.psi1 *= Complex(0.3, 1.1);
    v.psi2 *= Complex(-0.5, 0.2);
    for (auto f : {energy_E1<Complex>, energy_E2<Complex>}) {
      const Complex uv = f(u, v), vu = f(v, u);
      CHECK(std::abs(uv - std::conj(vu)) <= 1e-13 * std::abs(uv));
      CHECK(f(u, u).real() >= 0.0);
      CHECK(std::abs(f(u, u).imag()) <= 1e-13 * f(u, u).real());
    }
  }
}

TEST_CASE("dissipativity inequalities") {
  const auto grid = Grid::make(513);
  const auto g = eigenmode_state(grid);
  CHECK(dissipativity_margin(EnergyForm::E1, g) > 0.0);
  CHECK(dissipativity_margin(EnergyForm::E2, g) > 0.0);
  const PolyState zero{Polynomial(), Polynomial()};
  CHECK(dissipativity_margin(EnergyForm::E1, zero) == 0.0);
  CHECK(dissipativity_margin(EnergyForm::E2, zero) == 0.0);
  for (auto form : {EnergyForm::E1, EnergyForm::E2}) {
    const auto rep = dissipativity_check(form, 1000, 42);
    INFO(rep.name, " min margin ", rep.value);
    CHECK(rep.pass);
    CHECK(rep.value >= -1e-10);
    CHECK(rep.samples == 1000);
    CHECK(rep.seed == 42);
  }
}

TEST_CASE("Sobolev and Lebesgue norms") {
  const auto grid = Grid::make(513);
  const auto one = pair_of(grid, [](double) { return 1.0; }, [](double) { return 0.0; });
  CHECK(sobolev_norm(one, 1) == doctest::Approx(1 / std::sqrt(5.0)).epsilon(1e-10));
  const auto f1 = RadialField::sample(grid, [](double) { return 1.0; });
  CHECK(lp_norm(f1, 10.0) == doctest::Approx(std::pow(0.2, 0.1)).epsilon(1e-10));
  const auto fr = RadialField::sample(grid, [](double x) { return x; }, Parity::odd);
  CHECK(lp_norm(fr, 2.0) == doctest::Approx(std::sqrt(1.0 / 7)).epsilon(1e-10));
  CHECK(lp_norm(fr, HUGE_VAL) == 1.0);

  const auto dp = RadialField::sample(grid, [](double x) { return psi_star(x).psi1_star - 2.0; });
  const double o = std::pow(oracle([](double r) { return std::pow(std::abs(psi_star(r).psi1_star - 2), 10) * std::pow(r, 4); }), 0.1);
  CHECK(std::abs(lp_norm(dp, 10.0) - o) < 1e-8);

  const auto sq = RadialField::sample(grid, [](double x) { return x * x; });
  // int (2 rho)^p rho^4 with p = 2: 4/7.
  CHECK(w1p_seminorm(sq, 2.0) == doctest::Approx(std::sqrt(4.0 / 7)).epsilon(1e-10));
}

TEST_CASE("norm homogeneity and triangle inequality") {
  std::mt19937_64 rng(11);
  const auto grid = Grid::make(257);
  for (int k = 0; k < 30; ++k) {
    const auto a = sample_poly_state(grid, {random_even_polynomial(rng), random_even_polynomial(rng)});
    const auto b = sample_poly_state(grid, {random_even_polynomial(rng), random_even_polynomial(rng)});
    const StatePair s{0.0, a.psi1 + b.psi1, a.psi2 + b.psi2};
    const double c = -3.7;
    const StatePair ca{0.0, c * a.psi1, c * a.psi2};
    for (int level : {1, 2, 3}) {
      // Third differences amplify roundoff by h^-3.
      const double tol = level == 3 ? 1e-10 : 1e-12;
      CHECK(sobolev_norm(ca, level) == doctest::Approx(std::abs(c) * sobolev_norm(a, level)).epsilon(tol));
      CHECK(sobolev_norm(s, level) <= sobolev_norm(a, level) + sobolev_norm(b, level) + 1e-12);
    }
    for (double p : {1.0, 2.0, 10.0, HUGE_VAL}) {
      CHECK(lp_norm(c * a.psi1, p) == doctest::Approx(std::abs(c) * lp_norm(a.psi1, p)).epsilon(1e-12));
      CHECK(lp_norm(s.psi1, p) <= lp_norm(a.psi1, p) + lp_norm(b.psi1, p) + 1e-12);
    }
    const double q = 30.0 / 11.0;
    CHECK(w1p_seminorm(s.psi1, q) <= w1p_seminorm(a.psi1, q) + w1p_seminorm(b.psi1, q) + 1e-12);
    CHECK(h32_proxy(ca) == doctest::Approx(std::abs(c) * h32_proxy(a)).epsilon(1e-12));
  }
}

TEST_CASE("interpolation proxy") {
  const auto grid = Grid::make(513);
  const StatePair z{0.0, RadialField(grid), RadialField(grid)};
  CHECK(h32_proxy(z) == 0.0);
  const auto g = eigenmode_state(grid);
  const double lo = std::min(sobolev_norm(g, 1), sobolev_norm(g, 2)), hi = std::max(sobolev_norm(g, 1), sobolev_norm(g, 2));
  CHECK(h32_proxy(g) >= lo);
  CHECK(h32_proxy(g) <= hi);
}

TEST_CASE("energy and Sobolev norms are equivalent on samples") {
  const auto r = norm_equivalence_ratios(1000, 42);
  INFO("ratio range ", r.lo, " ", r.hi);
  CHECK(r.lo >= 0.1);
  CHECK(r.hi <= 10.0);
}

TEST_CASE("Hardy-type ratios") {
  const auto grid = Grid::make(513);
  const auto one = hardy_ratios(RadialField::sample(grid, [](double) { return 1.0; }));
  CHECK(one.ratio_h1 == doctest::Approx(std::sqrt((1.0 / 3) / (1.0 / 5))).epsilon(1e-10));
  const auto sq = hardy_ratios(RadialField::sample(grid, [](double x) { return x * x; }));
  CHECK(std::isfinite(sq.max_ratio()));
  CHECK(sq.max_ratio() > 0.0);

  const auto a = hardy_checks(1000, 42, 513), b = hardy_checks(1000, 42, 1025);
  INFO("max ratio ", a.max_ratio(), " refined ", b.max_ratio());
  CHECK(a.max_ratio() < 50.0);
  CHECK(std::abs(b.max_ratio() / a.max_ratio() - 1) <= 0.1);
  CHECK_THROWS_AS(hardy_checks(0, 1), std::invalid_argument);
}
