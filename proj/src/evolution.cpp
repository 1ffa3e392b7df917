#include "wmlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "wmlab/norms.hpp"
#include "wmlab/profile.hpp"

namespace wmlab {

void EvolutionConfig::validate() const {
  if (n < 33 || n % 2 == 0) throw std::invalid_argument("grid size must be odd and at least 33");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
  if (!(tau_max > 0.0)) throw std::invalid_argument("tau_max must be positive");
  if (!(T >= 0.5 && T <= 1.5)) throw std::invalid_argument("T must lie in [1/2, 3/2]");
  if (snapshot_stride == 0) throw std::invalid_argument("snapshot_stride must be positive");
}

InitialData blowup_data(double T0, double radius) {
  InitialData d;
  d.f = [T0](double r) { return u_star(T0, 0.0, r); };
  d.g = [T0](double r) { return 2.0 / (T0 * T0 + r * r); };
  d.radius = radius;
  return d;
}

StatePair initial_state(const InitialData &data, double T, const GridPtr &grid) {
  if (!(T >= 0.5 && T <= 1.5)) throw std::invalid_argument("T must lie in [1/2, 3/2]");
  if (T * grid->radius() > data.radius * (1.0 + 1e-14))
    throw std::domain_error("initial data not defined on [0, T]");
  auto p1 = RadialField::sample(grid, [&](double r) { return T * data.f(std::min(T * r, data.radius)); });
  auto p2 = RadialField::sample(grid, [&](double r) { return T * T * data.g(std::min(T * r, data.radius)); });
  return {0.0, std::move(p1), std::move(p2)};
}

StatePair initial_state(const RadialField &f, const RadialField &g, double T, const GridPtr &grid) {
  InitialData d;
  d.f = [&f](double r) { return evaluate_at(f, r); };
  d.g = [&g](double r) { return evaluate_at(g, r); };
  d.radius = std::min(f.grid().radius(), g.grid().radius());
  return initial_state(d, T, grid);
}

double sine_defect(double psi, double rho, double series_threshold) {
  const double x = 2.0 * rho * psi;
  if (std::abs(x) < series_threshold) {
    // sin x - x = -x^3/6 + x^5/120 - x^7/5040 + x^9/362880 - x^11/39916800
    const double x2 = x * x;
    const double s = -1.0 / 6.0 +
                     x2 * (1.0 / 120.0 - x2 * (1.0 / 5040.0 - x2 * (1.0 / 362880.0 - x2 / 39916800.0)));
    return 8.0 * psi * psi * psi * s;
  }
  return (std::sin(x) - x) / (rho * rho * rho);
}

std::pair<RadialField, RadialField> rhs(const StatePair &s, double series_threshold) {
  const auto d1 = derivative(s.psi1);
  const auto d2 = second_derivative(s.psi1);
  const auto p2 = derivative(s.psi2);
  const Grid &g = s.grid();
  RadialField r1(s.grid_ptr()), r2(s.grid_ptr());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rho = g.node(i);
    const double u = s.psi1[i];
    r1[i] = s.psi2[i] - u - rho * d1[i];
    const double sing = i == 0 ? 4.0 * d2[0] : (4.0 / rho) * d1[i];
    r2[i] = d2[i] + sing - rho * p2[i] - 2.0 * s.psi2[i] - sine_defect(u, rho, series_threshold);
  }
  return {std::move(r1), std::move(r2)};
}

namespace {

StatePair axpy(const StatePair &s, double h, const std::pair<RadialField, RadialField> &k) {
  StatePair out = s;
  for (std::size_t i = 0; i < s.psi1.size(); ++i) {
    out.psi1[i] += h * k.first[i];
    out.psi2[i] += h * k.second[i];
  }
  return out;
}

bool finite_and_bounded(const StatePair &s) {
  for (std::size_t i = 0; i < s.psi1.size(); ++i) {
    const double a = s.psi1[i], b = s.psi2[i];
    if (!(std::abs(a) <= 1e8) || !(std::abs(b) <= 1e8)) return false;
  }
  return true;
}

}  // namespace

StatePair step_rk4(const StatePair &s, double dtau, double series_threshold) {
  if (dtau == 0.0) return s;
  const auto k1 = rhs(s, series_threshold);
  const auto k2 = rhs(axpy(s, 0.5 * dtau, k1), series_threshold);
  const auto k3 = rhs(axpy(s, 0.5 * dtau, k2), series_threshold);
  const auto k4 = rhs(axpy(s, dtau, k3), series_threshold);
  StatePair out = s;
  out.tau = s.tau + dtau;
  for (std::size_t i = 0; i < s.psi1.size(); ++i) {
    out.psi1[i] += dtau / 6.0 * (k1.first[i] + 2.0 * k2.first[i] + 2.0 * k3.first[i] + k4.first[i]);
    out.psi2[i] += dtau / 6.0 * (k1.second[i] + 2.0 * k2.second[i] + 2.0 * k3.second[i] + k4.second[i]);
  }
  if (!finite_and_bounded(out)) {
    double a = 0.0;
    if (std::isfinite(out.psi1[0])) a = out.psi1[0];
    const int side = std::isnan(a) ? 0 : (a - 2.0 > 0.0 ? 1 : -1);
    throw InstabilityError("solution exceeded 1e8", out.tau, side);
  }
  return out;
}

double unstable_coefficient(const StatePair &s) {
  const Grid &g = s.grid();
  RadialField num(s.grid_ptr()), den(s.grid_ptr());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rho = g.node(i);
    const double g1 = eigenfunction_g(rho).first;
    num[i] = (s.psi1[i] - psi_star(rho).psi1_star) * g1;
    den[i] = g1 * g1;
  }
  return quadrature(num, 4) / quadrature(den, 4);
}

namespace {

struct Monitors {
  double linf, l2, l10, h1, h2, q1, q2, a;
};

Monitors measure(const StatePair &s, const StatePair &profile) {
  StatePair phi{s.tau, s.psi1 - profile.psi1, s.psi2 - profile.psi2};
  Monitors m;
  m.linf = lp_norm(phi.psi1, HUGE_VAL);
  m.l2 = lp_norm(phi.psi1, 2.0);
  m.l10 = lp_norm(phi.psi1, 10.0);
  m.h1 = sobolev_norm(phi, 1);
  m.h2 = sobolev_norm(phi, 2);
  m.q1 = m.l10 * m.l10;
  m.q2 = std::pow(w1p_seminorm(phi.psi1, 30.0 / 11.0), 6.0);
  m.a = unstable_coefficient(s);
  return m;
}

int sign_of(double a) { return a > 0.0 ? 1 : (a < 0.0 ? -1 : 0); }

}  // namespace

EvolutionTrace evolve_state(const EvolutionConfig &cfg, StatePair s) {
  cfg.validate();
  const double dtau_max = cfg.cfl * s.grid().spacing();
  const auto steps = static_cast<std::size_t>(std::ceil(cfg.tau_max / dtau_max - 1e-12));
  const double dtau = cfg.tau_max / static_cast<double>(steps);
  const StatePair profile = profile_state(s.grid_ptr());

  EvolutionTrace trace;
  Monitors m = measure(s, profile);
  double s1 = 0.0, s2 = 0.0;
  auto record = [&](const Monitors &mm, double tau) {
    trace.rows.push_back({tau, mm.linf, mm.l2, mm.l10, mm.h1, mm.h2, s1, s2, mm.a});
  };
  record(m, s.tau);
  trace.side = sign_of(m.a);
  for (std::size_t k = 1; k <= steps; ++k) {
    try {
      s = step_rk4(s, dtau, cfg.series_threshold);
    } catch (const InstabilityError &) {
      // trace.side keeps the sign of a from the last finite state.
      trace.aborted = true;
      break;
    }
    const Monitors next = measure(s, profile);
    s1 += 0.5 * (m.q1 + next.q1) * dtau;
    s2 += 0.5 * (m.q2 + next.q2) * dtau;
    m = next;
    trace.side = sign_of(m.a);
    const bool stop = cfg.stop_threshold > 0.0 && std::abs(m.a) > cfg.stop_threshold;
    if (k % cfg.snapshot_stride == 0 || k == steps || stop) record(m, s.tau);
    if (stop) {
      trace.stopped_early = true;
      break;
    }
  }
  trace.final_tau = s.tau;
  trace.final_state = std::move(s);
  return trace;
}

EvolutionTrace evolve(const EvolutionConfig &cfg, const InitialData &data) {
  cfg.validate();
  auto grid = Grid::make(cfg.n);
  return evolve_state(cfg, initial_state(data, cfg.T, grid));
}

int probe_sign(const EvolutionConfig &cfg, const InitialData &data, double T, const TuningOptions &opt) {
  EvolutionConfig c = cfg;
  c.T = T;
  c.tau_max = opt.tau_diag;
  c.stop_threshold = opt.decision_threshold;
  c.snapshot_stride = 1u << 30;
  return evolve(c, data).side;
}

TuningResult tune_T(const EvolutionConfig &cfg, const InitialData &data, double t_lo, double t_hi,
                    const TuningOptions &opt) {
  if (!(t_lo < t_hi)) throw std::invalid_argument("bracket must satisfy t_lo < t_hi");
  TuningResult res;
  res.tau_diag = opt.tau_diag;
  const int s_lo = probe_sign(cfg, data, t_lo, opt);
  const int s_hi = probe_sign(cfg, data, t_hi, opt);
  if (s_lo == s_hi || s_lo == 0 || s_hi == 0)
    throw NoSignChange("unstable coefficient has the same sign at both bracket ends");

  const unsigned jobs = std::max(1u, opt.jobs);
  int iter = 0;
  while (t_hi - t_lo >= opt.tolerance && iter < opt.max_iterations) {
    ++iter;
    // jobs interior probes split the bracket into jobs + 1 equal parts.
    std::vector<double> ts(jobs);
    std::vector<int> signs(jobs);
    for (unsigned j = 0; j < jobs; ++j)
      ts[j] = t_lo + (t_hi - t_lo) * static_cast<double>(j + 1) / static_cast<double>(jobs + 1);
    if (jobs == 1) {
      signs[0] = probe_sign(cfg, data, ts[0], opt);
    } else {
      std::vector<std::thread> pool;
      for (unsigned j = 0; j < jobs; ++j)
        pool.emplace_back([&, j] { signs[j] = probe_sign(cfg, data, ts[j], opt); });
      for (auto &t : pool) t.join();
    }
    double new_lo = t_lo, new_hi = t_hi;
    int decided = s_hi;
    for (unsigned j = 0; j < jobs; ++j) {
      if (signs[j] == s_lo) {
        new_lo = ts[j];
      } else {
        new_hi = ts[j];
        decided = signs[j];
        break;
      }
    }
    const double mid = jobs == 1 ? ts[0] : 0.5 * (new_lo + new_hi);
    t_lo = new_lo;
    t_hi = new_hi;
    res.history.push_back({iter, t_lo, t_hi, mid, jobs == 1 ? signs[0] : decided, opt.tau_diag});
  }
  res.t_star = 0.5 * (t_lo + t_hi);
  return res;
}

PhysicalSlice to_physical(const StatePair &s, double T) {
  PhysicalSlice out;
  const double scale = std::exp(-s.tau);
  out.t = T - T * scale;
  const double width = T * scale;
  const Grid &g = s.grid();
  out.r.resize(g.size());
  out.u.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.r[i] = width * g.node(i);
    out.u[i] = s.psi1[i] / (T * scale);
  }
  return out;
}

double fit_log_slope(const std::vector<double> &tau, const std::vector<double> &v, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] < lo || tau[i] > hi || !(std::abs(v[i]) > 0.0)) continue;
    const double y = std::log(std::abs(v[i]));
    sx += tau[i];
    sy += y;
    sxx += tau[i] * tau[i];
    sxy += tau[i] * y;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("fit_log_slope needs at least two samples in range");
  const double dm = static_cast<double>(m);
  return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

}  // namespace wmlab
