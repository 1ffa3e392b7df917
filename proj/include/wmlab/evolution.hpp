#ifndef WMLAB_EVOLUTION_HPP_
#define WMLAB_EVOLUTION_HPP_

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wmlab/state.hpp"

namespace wmlab {

struct EvolutionConfig {
  std::size_t n = 513;
  double cfl = 0.4;
  double tau_max = 12.0;
  double T = 1.0;
  double series_threshold = 1e-2;
  std::size_t snapshot_stride = 16;  // steps between recorded rows
  /// Stop once |a(tau)| exceeds this (0 disables the early exit).
  double stop_threshold = 0.0;

  void validate() const;
};

/// Physical Cauchy data u(0, r) = f(r), u_t(0, r) = g(r) for r in [0, radius].
struct InitialData {
  std::function<double(double)> f;
  std::function<double(double)> g;
  double radius = 1.5;
};

/// Data of the exact blowup solution with blowup time T0, defined on [0, radius].
InitialData blowup_data(double T0 = 1.0, double radius = 2.0);

/// psi1(0, rho) = T f(T rho), psi2(0, rho) = T^2 g(T rho).
StatePair initial_state(const InitialData &data, double T, const GridPtr &grid);
StatePair initial_state(const RadialField &f, const RadialField &g, double T, const GridPtr &grid);

class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string &what, double tau, int side)
      : std::runtime_error(what), tau_(tau), side_(side) {}
  double tau() const { return tau_; }
  int side() const { return side_; }  // sign of the unstable coefficient at abort

 private:
  double tau_;
  int side_;
};

/// Right-hand side of the similarity-coordinate system.
std::pair<RadialField, RadialField> rhs(const StatePair &s, double series_threshold = 1e-2);

/// (sin(2 rho psi) - 2 rho psi) / rho^3, with its series near rho psi = 0.
double sine_defect(double psi, double rho, double series_threshold = 1e-2);

/// Classical RK4 step; throws InstabilityError when any value exceeds 1e8.
StatePair step_rk4(const StatePair &s, double dtau, double series_threshold = 1e-2);

/// a = <phi1, g1> / <g1, g1> in L^2(rho^4), phi1 = psi1 - Psi1*.
double unstable_coefficient(const StatePair &s);

struct TraceRow {
  double tau;
  double linf_phi1, l2_phi1, l10_phi1;
  double h1_Phi, h2_Phi;
  double s1_partial, s2_partial;
  double a_coeff;
};

struct EvolutionTrace {
  std::vector<TraceRow> rows;
  bool aborted = false;      // instability guard fired
  bool stopped_early = false;  // stop_threshold reached
  int side = 0;              // sign of a at the last recorded step
  double final_tau = 0.0;
  StatePair final_state;
};

EvolutionTrace evolve(const EvolutionConfig &cfg, const InitialData &data);
EvolutionTrace evolve_state(const EvolutionConfig &cfg, StatePair s);

struct BracketStep {
  int iter;
  double t_lo, t_hi, t_mid;
  int sign;
  double tau_diag;
};

struct TuningResult {
  double t_star = 0.0;
  std::vector<BracketStep> history;
  double tau_diag = 0.0;
};

struct TuningOptions {
  double tolerance = 1e-10;
  double tau_diag = 16.0;
  /// |a| at which a probe is decided before tau_diag.
  double decision_threshold = 0.5;
  unsigned jobs = 1;
  int max_iterations = 200;
};

class NoSignChange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sign of the unstable coefficient for one probe T.
int probe_sign(const EvolutionConfig &cfg, const InitialData &data, double T, const TuningOptions &opt);

/// Bisection in T on the late-time sign of the unstable coefficient.
TuningResult tune_T(const EvolutionConfig &cfg, const InitialData &data, double t_lo, double t_hi,
                    const TuningOptions &opt = {});

struct PhysicalSlice {
  double t;
  std::vector<double> r;
  std::vector<double> u;
};

/// Inverse similarity transform: t = T - T e^-tau, u = e^tau psi1(r/(T-t)) / T.
PhysicalSlice to_physical(const StatePair &s, double T);

/// Least-squares slope of log|v| against tau over rows with tau in [lo, hi].
double fit_log_slope(const std::vector<double> &tau, const std::vector<double> &v, double lo, double hi);

}  // namespace wmlab

#endif  // WMLAB_EVOLUTION_HPP_
