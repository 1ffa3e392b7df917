#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <boost/math/differentiation/autodiff.hpp>

#include "wmlab/profile.hpp"

using namespace wmlab;
using boost::math::differentiation::make_fvar;
constexpr double pi = std::numbers::pi;

namespace {

struct Jet {
  long double u, du, ddu;
};

template <typename F>
Jet jet(F f, long double r) {
  const auto y = f(make_fvar<long double, 2>(r));
  return {y.derivative(0), y.derivative(1), y.derivative(2)};
}

long double op1(const Jet &j, long double r, bool potential) {
  const long double q = 1 + r * r;
  return (r * r - 1) * j.ddu + (6 * r - 4 / r) * j.du + (6 - (potential ? 16 / (q * q) : 0)) * j.u;
}

// Wronskian f g' - f' g weighted by rho^4 (1 - rho^2).
long double weighted_wronskian(const Jet &a, const Jet &b, long double r) {
  return (a.u * b.du - a.du * b.u) * r * r * r * r * (1 - r * r);
}

Complex d1(const std::function<Complex(double)> &f, double x, double h = 2e-3) {
  static const double w[] = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0, 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
  Complex acc = 0.0;
  for (int k = 0; k < 9; ++k) acc += w[k] * f(x + (k - 4) * h);
  return acc / h;
}

}  // namespace

TEST_CASE("u_star closed form and limits") {
  CHECK(u_star(1, 0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(u_star(1, 0, 1e-12) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(u_star(1, 0, 1) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(u_star(2, 1, 1) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK_THROWS_AS(u_star(1, 1, 0.5), std::domain_error);
  CHECK_THROWS_AS(u_star(1, 0, -0.1), std::domain_error);
}

TEST_CASE("psi_star values and static identity") {
  const auto p0 = psi_star(0.0), p1 = psi_star(1.0);
  CHECK(p0.psi1_star == 2.0);
  CHECK(p0.psi2_star == 2.0);
  CHECK(p1.psi1_star == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(p1.psi2_star == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(psi_star(1.5), std::domain_error);
  CHECK_THROWS_AS(psi_star(-0.1), std::domain_error);

  // psi2* = psi1* + rho psi1*', with the derivative from automatic differentiation.
  double worst = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const long double r = i / 1000.0L;
    const auto j = jet([](auto x) { return 2 * atan(x) / x; }, r);
    const auto p = psi_star(static_cast<double>(r));
    worst = std::max(worst, static_cast<double>(std::fabs(p.psi2_star - j.u - r * j.du)));
    worst = std::max(worst, std::abs(psi1_star_derivative(static_cast<double>(r)) - static_cast<double>(j.du)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("corotational embedding lands on the unit sphere") {
  const auto o = corotational_embed(1.234, 0.0, {0, 1, 0});
  CHECK(o[0] == 0.0);
  CHECK(o[1] == 0.0);
  CHECK(o[2] == 0.0);
  CHECK(o[3] == 1.0);
  const auto e = corotational_embed(pi / 2, 1.0, {1, 0, 0});
  CHECK(std::abs(e[0] - 1) < 1e-15);
  CHECK(std::abs(e[3]) < 1e-15);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-5, 5);
  for (int k = 0; k < 1000; ++k) {
    std::array<double, 3> d{dist(rng), dist(rng), dist(rng)};
    const double len = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    for (auto &c : d) c /= len;
    const auto v = corotational_embed(dist(rng), std::abs(dist(rng)), d);
    CHECK(std::abs(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]) - 1) <= 1e-15);
  }
}

TEST_CASE("eigenfunction g annihilates the eigenvalue-1 operator") {
  CHECK(eigenfunction_g(0.0).first == 1.0);
  CHECK(eigenfunction_g(0.0).second == 2.0);
  CHECK(eigenfunction_g(1.0).first == 0.5);
  CHECK(eigenfunction_g(1.0).second == 0.5);
  double worst = 0.0;
  for (int i = 1; i <= 99; ++i) {
    const long double r = i / 100.0L;
    const auto j = jet([](auto x) { return 1 / (1 + x * x); }, r);
    worst = std::max(worst, static_cast<double>(std::fabs(op1(j, r, true))));
    CHECK(eigenfunction_g(static_cast<double>(r)).first == doctest::Approx(static_cast<double>(j.u)).epsilon(1e-15));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("second eigenvalue-1 solution gtilde1") {
  const auto form = [](auto x) { return (12 * x * x * x * atanh(x) - 9 * x * x - 1) / (x * x * x * (x * x + 1)); };
  double worst = 0.0;
  for (int i = 10; i <= 90; ++i) {
    const long double r = i / 100.0L;
    const auto j = jet(form, r);
    worst = std::max(worst, static_cast<double>(std::fabs(op1(j, r, true))));
  }
  CHECK(worst < 1e-10);

  // Long double evaluation of the closed form at 1/2.
  const long double h = 0.5L;
  const long double oracle = (12 * h * h * h * std::atanh(h) - 9 * h * h - 1) / (h * h * h * (h * h + 1));
  CHECK(gtilde1(0.5) == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-14));
  CHECK(gtilde1(0.5) == doctest::Approx(-15.5267).epsilon(5e-6));
  CHECK_THROWS_AS(gtilde1(0.0), std::domain_error);
  CHECK_THROWS_AS(gtilde1(1.0), std::domain_error);

  for (long double r : {0.2L, 0.5L, 0.8L}) {
    const auto a = jet([](auto x) { return 1 / (1 + x * x); }, r);
    const auto b = jet(form, r);
    CHECK(std::fabs(weighted_wronskian(a, b, r) - 3) < 1e-10);
  }
}

TEST_CASE("free fundamental system psi0, psi1") {
  CHECK(free_psi0_psi1(0.0).first == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // Series 1/3 + rho^2/5 + rho^4/7 near the origin.
  for (double r : {1e-4, 1e-3, 5e-3, 2e-2}) {
    const double series = 1.0 / 3 + r * r / 5 + r * r * r * r / 7 + std::pow(r, 6) / 9;
    CHECK(free_psi0_psi1(r).first == doctest::Approx(series).epsilon(1e-13));
  }
  const auto psi0 = [](auto x) { return (atanh(x) - x) / (x * x * x); };
  const auto psi1 = [](auto x) { return 1 / (x * x * x); };
  for (long double r : {0.25L, 0.5L, 0.75L})
    CHECK(std::fabs(weighted_wronskian(jet(psi0, r), jet(psi1, r), r) + 1) < 1e-10);
  double worst = 0.0;
  for (int i = 10; i <= 90; ++i) {
    const long double r = i / 100.0L;
    worst = std::max(worst, static_cast<double>(std::fabs(op1(jet(psi0, r), r, false))));
    CHECK(free_psi0_psi1(static_cast<double>(r)).first ==
          doctest::Approx(static_cast<double>(jet(psi0, r).u)).epsilon(1e-13));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("Bessel-type solutions b1, b2") {
  const Complex lam(0.5, 2.0);
  CHECK(std::abs(bessel_b(1, 0.0, lam)) == 0.0);
  CHECK(std::abs(bessel_b(1, 1e-6, lam)) < 1e-11);
  CHECK_THROWS_AS(bessel_b(1, 0.5, 1.0), std::domain_error);
  const std::function<Complex(double)> b1 = [&](double r) { return bessel_b(1, r, lam); };
  const std::function<Complex(double)> b2 = [&](double r) { return bessel_b(2, r, lam); };
  // fg' - f'g convention; W(b2, b1) carries the constant i(1 - lambda).
  const double r = 0.3;
  const Complex w = b2(r) * d1(b1, r) - d1(b2, r) * b1(r);
  CHECK(std::abs(w - Complex(0, 1) * (1.0 - lam)) < 1e-10);
  // Series branch for small arguments joins the direct formula.
  const Complex lam_small(0.999, 0.0);
  CHECK(std::abs(bessel_b(1, 0.2, lam_small) -
                 std::sqrt(0.96) * (std::sin(Complex(0, 0.001) * arctanh(0.2)) / (Complex(0, 0.001) * arctanh(0.2)) -
                                    std::cos(Complex(0, 0.001) * arctanh(0.2)))) < 1e-14);
}

TEST_CASE("free solutions w1, w2 near rho = 1") {
  const Complex lam(0.5, 3.0);
  const std::function<Complex(double)> w1 = [&](double r) { return free_w(1, r, lam); };
  const std::function<Complex(double)> w2 = [&](double r) { return free_w(2, r, lam); };
  const double r = 0.5;
  CHECK(std::abs(w1(r) * d1(w2, r) - d1(w1, r) * w2(r) - 2.0 * (1.0 - lam)) < 1e-10);
  for (double s : {0.0, 0.3, 0.9, 0.999}) CHECK(std::abs(free_w(1, s, 1.0) - std::sqrt(1 - s * s)) < 1e-15);
  // w2'/w2 = (a - rho)/(1 - rho^2) with a = 1 - lambda; then w2'' = -(2 lambda - lambda^2)/(1-rho^2)^2 w2.
  const std::function<Complex(double)> dw = [&](double x) { return (1.0 - lam - x) / (1 - x * x) * w2(x); };
  for (double s : {0.2, 0.5, 0.8}) {
    CHECK(std::abs(d1(w2, s) - dw(s)) < 1e-10 * std::abs(dw(s)));
    const Complex res = d1(dw, s) + (2.0 * lam - lam * lam) / ((1 - s * s) * (1 - s * s)) * w2(s);
    CHECK(std::abs(res) < 1e-8);
  }
}

TEST_CASE("potentials") {
  CHECK(potential_V(0) == -16.0);
  CHECK(potential_V(1) == -4.0);
  CHECK(potential_VN(0) == -16.0);
  CHECK(potential_VN(1) == 0.0);
  for (int i = 0; i <= 100; ++i) {
    const double r = i / 100.0;
    CHECK(potential_VN(r) == doctest::Approx(potential_V(r) * (1 - r * r)).epsilon(1e-15));
  }
}

TEST_CASE("nonlinearity N: branches and special values") {
  for (int i = 0; i <= 100; ++i) CHECK(nonlinearity_N(0.0, i / 100.0) == 0.0);
  // At rho = 0: (1/2) V_N(0) u^2 - 4 u^3 / 3.
  CHECK(nonlinearity_N(1.0, 0.0) == doctest::Approx(-28.0 / 3.0).epsilon(1e-14));
  CHECK(nonlinearity_N(2.0, 0.0) == doctest::Approx(-32.0 - 32.0 / 3.0).epsilon(1e-14));
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double r = 0.05 + 0.95 * i / 199.0;
    for (int k = 0; k < 200; ++k) {
      const double u = -2.0 + 4.0 * k / 199.0;
      worst = std::max(worst, std::abs(nonlinearity_N_direct(u, r) - nonlinearity_N_taylor(u, r)));
    }
  }
  CHECK(worst < 1e-9);
  // The dispatcher is continuous across its threshold.
  CHECK(std::abs(nonlinearity_N(0.7, 0.0099) - nonlinearity_N(0.7, 0.0101)) < 1e-2);
}

TEST_CASE("arctanh accuracy near 1") {
  for (double x : {0.5, 0.9, 1 - 1e-8, 1 - 1e-12}) CHECK(arctanh(x) == doctest::Approx(std::atanh(x)).epsilon(1e-12));
  CHECK(arctanh(0.0) == 0.0);
}
