#include <doctest.h>

#include <cmath>

#include "wmlab/evolution.hpp"
#include "wmlab/profile.hpp"

using namespace wmlab;

namespace {

double max_abs(const RadialField &f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

double max_diff(const StatePair &a, const StatePair &b) {
  return std::max(max_abs(a.psi1 - b.psi1), max_abs(a.psi2 - b.psi2));
}

StatePair profile_plus_mode(const GridPtr &grid, double eps) {
  const StatePair p = profile_state(grid), m = eigenmode_state(grid);
  return {0.0, p.psi1 + eps * m.psi1, p.psi2 + eps * m.psi2};
}

double static_residual(std::size_t n) {
  const auto r = rhs(profile_state(Grid::make(n)));
  return std::max(max_abs(r.first), max_abs(r.second));
}

InitialData bump_data(double eps) {
  InitialData d = blowup_data(1.0, 2.0);
  auto f0 = d.f;
  d.f = [f0, eps](double r) {
    return f0(r) + eps * (1 - r * r) * (1 - r * r);
  };
  return d;
}

std::vector<double> column(const EvolutionTrace &t, double TraceRow::*field) {
  std::vector<double> v;
  for (const auto &r : t.rows) v.push_back(r.*field);
  return v;
}

}  // namespace

TEST_CASE("initial_state rescales the data") {
  const auto grid = Grid::make(129);
  const auto s = initial_state(blowup_data(1.0, 2.0), 1.0, grid);
  const auto p = profile_state(grid);
  CHECK(max_diff(s, p) < 1e-14);

  InitialData zero{[](double) { return 0.0; }, [](double) { return 0.0; }, 2.0};
  const auto z = initial_state(zero, 1.0, grid);
  CHECK(max_abs(z.psi1) == 0.0);
  CHECK(max_abs(z.psi2) == 0.0);

  const auto s11 = initial_state(blowup_data(1.0, 2.0), 1.1, grid);
  CHECK(s11.psi1[0] == doctest::Approx(2.2).epsilon(1e-14));

  InitialData shortd = blowup_data(1.0, 1.0);
  CHECK_THROWS_AS(initial_state(shortd, 1.2, grid), std::domain_error);
  CHECK_THROWS_AS(initial_state(blowup_data(), 1.6, grid), std::invalid_argument);

  const auto f = RadialField::sample(Grid::make(257, 1.5), [](double r) { return u_star(1.0, 0.0, r); });
  const auto g = RadialField::sample(Grid::make(257, 1.5), [](double r) { return 2 / (1 + r * r); });
  CHECK(max_diff(initial_state(f, g, 1.0, grid), p) < 1e-8);
}

TEST_CASE("static residual") {
  CHECK(static_residual(513) <= 1e-7);
  const double e65 = static_residual(65), e129 = static_residual(129), e257 = static_residual(257);
  CHECK(std::log2(e65 / e129) >= 3.8);
  CHECK(std::log2(e129 / e257) >= 3.8);
}

TEST_CASE("rhs at the origin") {
  const auto grid = Grid::make(65);
  auto s = profile_plus_mode(grid, 0.3);
  const auto r = rhs(s);
  CHECK(r.first[0] == doctest::Approx(s.psi2[0] - s.psi1[0]).epsilon(1e-15));
}

TEST_CASE("sine_defect branches agree") {
  for (double psi : {0.5, 1.0, 2.0}) {
    const double rho = 0.999e-2 / (2 * psi), rho2 = 1.001e-2 / (2 * psi);
    const double series = sine_defect(psi, rho), direct = sine_defect(psi, rho2);
    CHECK(series == doctest::Approx(direct).epsilon(1e-5));
    CHECK(sine_defect(psi, 0.0) == doctest::Approx(-4.0 / 3 * psi * psi * psi));
  }
}

TEST_CASE("linearization at the profile is the identity along g") {
  const auto grid = Grid::make(513);
  const double eps = 1e-5;
  const auto rp = rhs(profile_plus_mode(grid, eps)), rm = rhs(profile_plus_mode(grid, -eps));
  const auto m = eigenmode_state(grid);
  const double e1 = max_abs((1 / (2 * eps)) * (rp.first - rm.first) - m.psi1);
  const double e2 = max_abs((1 / (2 * eps)) * (rp.second - rm.second) - m.psi2);
  INFO("first ", e1, " second ", e2);
  CHECK(e1 <= 1e-6);
  CHECK(e2 <= 1e-6);
}

TEST_CASE("RK4 steps") {
  const auto grid = Grid::make(513);
  const double dt = 0.4 * grid->spacing();
  const auto p = profile_state(grid);
  StatePair s = p;
  for (int k = 0; k < 100; ++k) s = step_rk4(s, dt);
  CHECK(max_diff(s, p) < 1e-6);

  auto same = step_rk4(p, 0.0);
  CHECK(max_diff(same, p) == 0.0);

  const double eps = 1e-7;
  StatePair q = profile_plus_mode(grid, eps);
  const int steps = static_cast<int>(std::ceil(1.0 / dt));
  for (int k = 0; k < steps; ++k) q = step_rk4(q, 1.0 / steps);
  CHECK(q.tau == doctest::Approx(1.0));
  CHECK(unstable_coefficient(q) / eps == doctest::Approx(std::exp(1.0)).epsilon(0.02));

  StatePair big = p;
  big.psi1[10] = 1e9;
  try {
    step_rk4(big, dt);
    FAIL("instability guard did not fire");
  } catch (const InstabilityError &) {
  }
}

TEST_CASE("unstable coefficient") {
  const auto grid = Grid::make(257);
  CHECK(unstable_coefficient(profile_state(grid)) == 0.0);
  CHECK(unstable_coefficient(profile_plus_mode(grid, 1e-3)) == doctest::Approx(1e-3).epsilon(1e-12));

  // Gram-Schmidt of rho^2 against g1 in L^2(rho^4).
  const auto g1 = eigenmode_state(grid).psi1;
  const auto v = RadialField::sample(grid, [](double r) { return r * r; });
  const double c = quadrature(v * g1, 4) / quadrature(g1 * g1, 4);
  const auto w = v - c * g1;
  auto s = profile_state(grid);
  s.psi1 += 1e-2 * w;
  CHECK(std::abs(unstable_coefficient(s)) < 1e-10);
}

TEST_CASE("exact data stays on the profile") {
  EvolutionConfig cfg;
  cfg.tau_max = 10.0;
  const auto tr = evolve(cfg, blowup_data());
  CHECK_FALSE(tr.aborted);
  double worst = 0.0;
  for (const auto &r : tr.rows)
    worst = std::max({worst, r.linf_phi1, r.l2_phi1, r.l10_phi1, r.h1_Phi, r.h2_Phi, std::abs(r.a_coeff)});
  CHECK(worst < 1e-5);
  CHECK(tr.final_tau == doctest::Approx(10.0));
}

TEST_CASE("untuned perturbation grows at the unstable rate") {
  EvolutionConfig cfg;
  cfg.tau_max = 8.5;
  const auto tr = evolve(cfg, bump_data(1e-3));
  REQUIRE(tr.rows.back().tau >= 8.0);
  const double rate = fit_log_slope(column(tr, &TraceRow::tau), column(tr, &TraceRow::a_coeff), 4.0, 8.0);
  INFO("rate ", rate);
  CHECK(std::abs(rate - 1.0) <= 0.05);

  for (std::size_t i = 1; i < tr.rows.size(); ++i) {
    CHECK(tr.rows[i].tau > tr.rows[i - 1].tau);
    CHECK(tr.rows[i].s1_partial >= tr.rows[i - 1].s1_partial);
    CHECK(tr.rows[i].s2_partial >= tr.rows[i - 1].s2_partial);
  }
}

TEST_CASE("tuning recovers the blowup time of a rescaled profile") {
  EvolutionConfig cfg;
  cfg.n = 129;
  TuningOptions opt;
  opt.tolerance = 1e-9;
  const auto res = tune_T(cfg, blowup_data(1.05, 2.0), 0.8, 1.2, opt);
  CHECK(std::abs(res.t_star - 1.05) < 1e-6);
  double width = 0.4;
  for (const auto &b : res.history) {
    CHECK(b.t_hi - b.t_lo < width);
    width = b.t_hi - b.t_lo;
  }
  CHECK(width <= opt.tolerance);

  CHECK_THROWS_AS(tune_T(cfg, blowup_data(1.05, 2.0), 1.1, 1.2, opt), NoSignChange);
}

TEST_CASE("tuned perturbation decays") {
  EvolutionConfig cfg;
  cfg.n = 129;
  TuningOptions opt;
  opt.tolerance = 1e-10;
  const auto res = tune_T(cfg, bump_data(1e-3), 0.8, 1.2, opt);
  CHECK(std::abs(res.t_star - 1.0) <= 0.2);
  cfg.T = res.t_star;
  cfg.tau_max = 9.0;
  const auto tr = evolve(cfg, bump_data(1e-3));
  REQUIRE_FALSE(tr.aborted);
  const double rate = fit_log_slope(column(tr, &TraceRow::tau), column(tr, &TraceRow::linf_phi1), 3.0, 9.0);
  INFO("L-infinity slope ", rate);
  CHECK(rate < 0.0);
}

TEST_CASE("physical coordinates") {
  const auto grid = Grid::make(129);
  const auto s = initial_state(blowup_data(1.0, 2.0), 1.2, grid);
  const auto u0 = to_physical(s, 1.2);
  CHECK(u0.t == 0.0);
  for (std::size_t i = 0; i < u0.r.size(); ++i)
    CHECK(u0.u[i] == doctest::Approx(u_star(1.0, 0.0, u0.r[i])).epsilon(1e-13));

  auto p = profile_state(grid);
  for (double tau : {0.0, 0.7, 3.0}) {
    p.tau = tau;
    for (double T : {0.8, 1.3}) {
      const auto u = to_physical(p, T);
      CHECK(u.t == doctest::Approx(T - T * std::exp(-tau)));
      double err = 0.0;
      for (std::size_t i = 0; i < u.r.size(); ++i)
        err = std::max(err, std::abs(u.u[i] - u_star(T, u.t, u.r[i])) / std::abs(u_star(T, u.t, u.r[i])));
      CHECK(err < 1e-12);
    }
  }
}

TEST_CASE("integrator self-convergence") {
  // Differences between successive refinements of the same perturbed run.
  auto final_psi1 = [](std::size_t n) {
    EvolutionConfig cfg;
    cfg.n = n;
    cfg.tau_max = 1.0;
    return evolve(cfg, bump_data(1e-1)).final_state.psi1;
  };
  const auto f65 = final_psi1(65), f129 = final_psi1(129), f257 = final_psi1(257), f513 = final_psi1(513);
  auto coarse_diff = [](const RadialField &a, const RadialField &b) {
    const std::size_t ratio = (b.size() - 1) / (a.size() - 1);
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i * ratio]));
    return m;
  };
  const double d1 = coarse_diff(f65, f129), d2 = coarse_diff(f129, f257), d3 = coarse_diff(f257, f513);
  INFO(d1, " ", d2, " ", d3);
  CHECK(std::log2(d1 / d2) >= 3.5);
  CHECK(std::log2(d2 / d3) >= 3.5);
}

TEST_CASE("configuration validation") {
  EvolutionConfig cfg;
  cfg.T = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.n = 64;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.cfl = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_NOTHROW(EvolutionConfig{}.validate());
}
