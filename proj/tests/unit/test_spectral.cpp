#include <doctest.h>

#include <cmath>
#include <string>

#include <boost/math/differentiation/autodiff.hpp>

#include "wmlab/profile.hpp"
#include "wmlab/spectral.hpp"

using namespace wmlab;

namespace {

const Complex one(1.0, 0.0);

// Sixth-order central differences of a complex function of rho.
template <typename F>
std::array<Complex, 2> fd6(F f, double r, double h) {
  const Complex fm3 = f(r - 3 * h), fm2 = f(r - 2 * h), fm1 = f(r - h), f0 = f(r), fp1 = f(r + h),
                fp2 = f(r + 2 * h), fp3 = f(r + 3 * h);
  const Complex d1 = (-fm3 + 9.0 * fm2 - 45.0 * fm1 + 45.0 * fp1 - 9.0 * fp2 + fp3) / (60 * h);
  const Complex d2 = (2.0 * fm3 - 27.0 * fm2 + 270.0 * fm1 - 490.0 * f0 + 270.0 * fp1 - 27.0 * fp2 + 2.0 * fp3) /
                     (180 * h * h);
  return {d1, d2};
}

double g1(double r) { return 1 / (1 + r * r); }
double dg1(double r) { return -2 * r / ((1 + r * r) * (1 + r * r)); }

SpectralOptions widened() {
  SpectralOptions o;
  o.enforce_strip = false;
  return o;
}

}  // namespace

TEST_CASE("ode_rhs annihilates the closed-form eigenvalue-1 solutions") {
  for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double ddg = (6 * r * r - 2) / std::pow(1 + r * r, 3);
    const auto d = ode_rhs(one, r, g1(r), dg1(r));
    CHECK(std::abs(d[0] - dg1(r)) == 0.0);
    CHECK(std::abs(d[1] - ddg) < 1e-12);
    CHECK(std::abs(spectral_operator(one, r, g1(r), dg1(r), ddg)) < 1e-12);

    // Derivatives of the closed form of gtilde1 by automatic differentiation.
    const auto x = boost::math::differentiation::make_fvar<double, 2>(r);
    const auto gt = (12 * x * x * x * atanh(x) - 9 * x * x - 1) / (x * x * x * (x * x + 1));
    CHECK(gt.derivative(0) == doctest::Approx(gtilde1(r)).epsilon(1e-13));
    CHECK(std::abs(spectral_operator(one, r, gt.derivative(0), gt.derivative(1), gt.derivative(2))) /
              std::abs(gt.derivative(0)) <
          1e-10);
  }
  CHECK_THROWS_AS(ode_rhs(one, 0.0, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(ode_rhs(one, 1.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("lambda = 0 solution checked by an independent difference oracle") {
  // Transported regular solution; u'' comes from differencing the transported u'.
  const Complex lam0(0.0, 0.0);
  const auto start = regular_solution_at_zero(lam0, 0.1);
  const auto du = [&](double r) { return integrate_ode(lam0, start, r).du; };
  for (double r : {0.2, 0.4, 0.6, 0.8}) {
    const auto p = integrate_ode(lam0, start, r);
    const Complex ddu = fd6(du, r, 1e-2)[0];
    CHECK(std::abs(spectral_operator(lam0, r, p.u, p.du, ddu)) / std::abs(p.u) < 1e-7);
  }
}

TEST_CASE("Frobenius series about the origin") {
  const auto s = SeriesSolution::at_zero(one, 0, 0.2);
  CHECK(s.eval_local(0.0).first == one);
  CHECK(s.eval_local(0.0).second == 0.0);
  for (std::size_t k = 0; k < s.coefficients().size(); ++k) CHECK(std::isfinite(std::abs(s.coefficients()[k])));
  const Complex ratio = s.eval(0.05).u / g1(0.05);
  for (double r : {0.05, 0.1, 0.15, 0.2}) CHECK(std::abs(s.eval(r).u / g1(r) - ratio) < 1e-10);

  for (Complex lam : {Complex(0.3, 2.0), Complex(-0.5, 7.0), Complex(0.7, -1.0)}) {
    const auto z = SeriesSolution::at_zero(lam, 0, 0.2);
    for (double r : {0.06, 0.09, 0.12, 0.15, 0.18}) {
      const auto p = z.eval(r);
      const auto d = ode_rhs(lam, r, p.u, p.du);
      const auto fd = fd6([&](double x) { return z.eval(x).du; }, r, 1e-3);
      CHECK(std::abs(d[1] - fd[0]) / std::abs(p.u) < 1e-10);
    }
    const auto a = integrate_ode(lam, regular_solution_at_zero(lam, 0.1), 0.5);
    const auto b = integrate_ode(lam, regular_solution_at_zero(lam, 0.2), 0.5);
    CHECK(std::abs(a.u - b.u) / std::abs(a.u) < 1e-9);
  }
  CHECK_THROWS_AS(regular_solution_at_zero(one, 0.3), std::domain_error);
}

TEST_CASE("Frobenius series about rho = 1") {
  const auto s = SeriesSolution::at_one(one, true, 0.2);
  CHECK(s.eval(1.0).u == one);
  const Complex ratio = s.eval(0.95).u / g1(0.95);
  for (double r : {0.8, 0.85, 0.9, 0.95, 0.99}) CHECK(std::abs(s.eval(r).u / g1(r) - ratio) < 1e-10);

  for (Complex lam : {Complex(0.5, 3.0), Complex(-0.6, 1.0)}) {
    const auto z = SeriesSolution::at_one(lam, true, 0.2);
    for (double r : {0.85, 0.9, 0.95}) {
      const auto p = z.eval(r);
      const auto d = ode_rhs(lam, r, p.u, p.du);
      const auto fd = fd6([&](double x) { return z.eval(x).du; }, r, 1e-3);
      CHECK(std::abs(d[1] - fd[0]) / std::abs(p.u) < 1e-10);
    }
  }
  CHECK_THROWS_AS(SeriesSolution::at_one(Complex(0.01, 0.0), true, 0.2), ResonanceError);
  CHECK_THROWS_AS(analytic_solution_at_one(one, 0.7), std::domain_error);
}

TEST_CASE("ODE transport") {
  const SolutionPair start{0.1, g1(0.1), dg1(0.1)};
  const auto end = integrate_ode(one, start, 0.5);
  CHECK(std::abs(end.u - 0.8) < 1e-10);

  const Complex lam(0.2, 5.0);
  const SolutionPair s0{0.2, Complex(1.0, 0.5), Complex(-0.3, 0.1)};
  const auto there = integrate_ode(lam, s0, 0.9);
  const auto back = integrate_ode(lam, there, 0.2);
  CHECK(std::abs(back.u - s0.u) < 1e-9);
  CHECK(std::abs(back.du - s0.du) < 1e-9);

  OdeTolerance tight{0.5e-11, 0.5e-14};
  const auto t2 = integrate_ode(lam, s0, 0.9, tight);
  CHECK(std::abs(t2.u - there.u) / std::abs(there.u) < 1e-9);
  CHECK_THROWS_AS(integrate_ode(lam, s0, 0.97), std::domain_error);
}

TEST_CASE("connection coefficient") {
  const auto at1 = connection_E(one, widened());
  CHECK(std::abs(at1.E) < 1e-8);
  CHECK(std::abs(connection_E(Complex(0.5, 0.0)).E) > 1e-3);
  const auto c = connection_E(Complex(0.5, 3.0));
  CHECK(c.wronskian_drift < 1e-8);

  CHECK_THROWS_AS(connection_E(Complex(0.8, 0.0)), std::domain_error);
  CHECK_THROWS_AS(connection_E(Complex(0.01, 0.01)), ResonanceError);

  for (Complex lam : {Complex(0.3, 2.0), Complex(-0.4, 11.0)}) {
    const Complex E = connection_value(lam), Ec = connection_value(std::conj(lam));
    CHECK(std::abs(Ec - std::conj(E)) <= 1e-10 * std::abs(E));
  }
}

TEST_CASE("Wronskian invariant on [0.2, 0.8]") {
  std::vector<double> probes;
  for (int k = 0; k <= 12; ++k) probes.push_back(0.2 + 0.05 * k);
  for (Complex lam : {Complex(0.7, 0.0), Complex(-0.7, 3.0), Complex(0.1, -15.0), Complex(-0.2, 19.0)}) {
    const SpectralBasis b(lam);
    CHECK(b.drift(probes) < 1e-8);
    for (double r : probes) {
      const auto v = b.at(r);
      const Complex w = (v.u0 * v.du1 - v.du0 * v.u1) * std::pow(r, 4) * std::pow(Complex(1 - r * r), lam);
      CHECK(std::abs(w - b.E()) <= 1e-8 * std::abs(b.E()));
    }
  }
}

TEST_CASE("matching and switch radii do not move E") {
  for (Complex lam : {Complex(0.5, 3.0), Complex(-0.3, 1.0)}) {
    const Complex base = connection_value(lam);
    SpectralOptions a, b, c;
    a.rho_match = 0.4;
    b.switch0 = 0.15;
    c.switch1 = 0.85;
    for (const auto &o : {a, b, c}) CHECK(std::abs(connection_value(lam, o) - base) <= 1e-8 * std::abs(base));
  }
}

TEST_CASE("simple eigenvalue at 1") {
  ScanOptions opt;
  opt.spectral = widened();
  CHECK(winding_circle(one, 0.1, opt) == 1);
  const auto z = refine_zero(Complex(1.02, 0.01), 1e-3, opt);
  CHECK(std::abs(z.lambda - 1.0) < 1e-8);
  CHECK(z.abs_E < 1e-10);
}

TEST_CASE("default strip scan finds no modes") {
  ScanOptions opt;
  const auto rep = scan_rectangle(Complex(-0.74, -20.0), Complex(0.74, 20.0), {{0.0, 0.05}}, opt);
  std::string found;
  for (const auto &z : rep.zeros) found += " " + std::to_string(z.lambda.real()) + "+" + std::to_string(z.lambda.imag()) + "i";
  INFO("winding ", rep.winding, " zeros", found);
  CHECK(rep.winding == static_cast<int>(rep.zeros.size()));
  CHECK(rep.winding == 0);
  CHECK(rep.zeros.empty());
}

TEST_CASE("scan counts zeros in a small rectangle") {
  ScanOptions opt;
  opt.spectral = widened();
  const auto rep = scan_rectangle(Complex(0.9, -0.1), Complex(1.1, 0.1), {}, opt);
  CHECK(rep.winding == 1);
  REQUIRE(rep.zeros.size() == 1);
  CHECK(std::abs(rep.zeros[0].lambda - 1.0) < 1e-8);
  CHECK_THROWS_AS(scan_rectangle(Complex(-0.8, -1.0), Complex(0.7, 1.0), {}, ScanOptions{}), std::domain_error);
}
