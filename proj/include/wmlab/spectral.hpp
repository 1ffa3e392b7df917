#ifndef WMLAB_SPECTRAL_HPP_
#define WMLAB_SPECTRAL_HPP_

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wmlab/grid.hpp"
#include "wmlab/ode_integrator.hpp"

namespace wmlab {

/// Value and derivative of a solution of the spectral equation at rho.
struct SolutionPair {
  double rho;
  Complex u;
  Complex du;
};

class ResonanceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};
class SeriesDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NearEigenvalue : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class PhaseTrackingFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (rho^2-1) u'' + (2(lambda+2) rho - 4/rho) u' + ((lambda+1)(lambda+2) - 16/(1+rho^2)^2) u.
Complex spectral_operator(Complex lambda, double rho, Complex u, Complex du, Complex ddu);

/// (u', u'') of the homogeneous spectral equation; rho must lie in (0, 1).
std::array<Complex, 2> ode_rhs(Complex lambda, double rho, Complex u, Complex du);

/// Frobenius solution sum_j a_j x^{j+sigma}, with x = rho about 0 (even j only)
/// or x = 1 - rho about 1.
class SeriesSolution {
 public:
  int center() const { return center_; }
  Complex sigma() const { return sigma_; }
  Complex lambda() const { return lambda_; }
  double radius_used() const { return radius_; }
  const std::vector<Complex> &coefficients() const { return coeffs_; }

  /// Value and rho-derivative at x (= rho for center 0, = 1 - rho for center 1).
  std::pair<Complex, Complex> eval_local(double x) const;
  SolutionPair eval(double rho) const;

  /// Index-0 (sigma = 0) or index -3 (sigma = -3) solution about rho = 0.
  static SeriesSolution at_zero(Complex lambda, int sigma, double radius);
  /// Index-0 (regular) or index 1 - lambda solution about rho = 1.
  static SeriesSolution at_one(Complex lambda, bool regular, double radius, double guard = 0.05);

 private:
  int center_ = 0;
  Complex sigma_;
  Complex lambda_;
  double radius_ = 0.0;
  std::vector<Complex> coeffs_;  // center 0: coeffs_[m] for power 2m + sigma
};

SolutionPair regular_solution_at_zero(Complex lambda, double rho_switch);
SolutionPair analytic_solution_at_one(Complex lambda, double rho_switch);
/// Transports (u, u') along [0.05, 0.95] with DOP853.
SolutionPair integrate_ode(Complex lambda, const SolutionPair &from, double to, OdeTolerance tol = {});

struct SpectralOptions {
  double rho_match = 0.5;
  double switch0 = 0.1;
  double switch1 = 0.9;
  OdeTolerance tol{};
  double exclusion_radius = 0.05;
  bool enforce_strip = true;
  std::size_t gj_order = 64;
  std::size_t panel_order = 16;
  /// Resolvents refuse lambda with |E(lambda)| below this.
  double eigen_threshold = 1e-8;
};

/// A point given both as rho and as t = 1 - rho (t is authoritative near 1).
struct RadialPoint {
  double rho;
  double t;
};

/// u0 (regular at 0, u0(0) = 1) and u1 (analytic at 1, u1(1) = 1) for one lambda,
/// with connection data so both can be evaluated anywhere in (0, 1].
class SpectralBasis {
 public:
  struct Values {
    Complex u0, du0, u1, du1;
  };

  SpectralBasis(Complex lambda, const SpectralOptions &opt = {}, bool with_connection = true);

  Complex lambda() const { return lambda_; }
  /// W(u0, u1)(rho) rho^4 (1-rho^2)^lambda at the matching point.
  Complex E() const { return E_; }

  Values at(double rho) const;
  /// Values at points sorted by increasing rho.
  std::vector<Values> at(const std::vector<RadialPoint> &pts) const;

  /// W(u0,u1) rho^4 (1-rho^2)^lambda at rho.
  Complex normalized_wronskian(double rho) const;
  /// Max relative deviation of the normalised Wronskian from E over the probes.
  double drift(const std::vector<double> &probes) const;

 private:
  Complex lambda_;
  SpectralOptions opt_;
  SeriesSolution u0s_, u1s_;
  std::optional<SeriesSolution> z0s_, z1s_;
  SolutionPair u0_sw_, u1_sw_;  // series data at the switch radii
  SolutionPair u0_match_, u1_match_;
  Complex E_;
  // u1 = A u0 + B z0 near 0; u0 = C u1 + D z1 near 1.
  Complex A_ = 0.0, B_ = 0.0, C_ = 0.0, D_ = 0.0;
  bool connected_ = false;
};

struct ConnectionEvaluation {
  Complex lambda;
  Complex E;
  double wronskian_drift;
};

ConnectionEvaluation connection_E(Complex lambda, const SpectralOptions &opt = {});
/// E alone, without connection data or drift probes.
Complex connection_value(Complex lambda, const SpectralOptions &opt = {});

struct Disk {
  Complex center;
  double radius;
};

struct ZeroRecord {
  Complex lambda;
  double abs_E;
  int iters;
};

struct ScanOptions {
  SpectralOptions spectral{};
  double density = 4.0;  // initial contour samples per unit length
  double grid_density = 10.0;  // seed grid points per unit length for zero search
  unsigned jobs = 1;
  int max_bisections = 40;
  double zero_tol = 1e-10;
};

struct ScanReport {
  Complex lo, hi;
  std::vector<Disk> exclusions;
  int winding = 0;
  std::vector<ZeroRecord> zeros;
  std::size_t evaluations = 0;
};

/// Winding number of E around the counter-clockwise circle.
int winding_circle(Complex center, double radius, const ScanOptions &opt, std::size_t *evals = nullptr);
/// Zeros of E in the rectangle [lo, hi] minus the exclusion disks.
ScanReport scan_rectangle(Complex lo, Complex hi, const std::vector<Disk> &exclusions, const ScanOptions &opt);
/// Complex secant iteration on E.
ZeroRecord refine_zero(Complex seed, double step, const ScanOptions &opt);

using ComplexFn = std::function<Complex(double)>;

/// (1 + lambda) u1 + rho u1' - f1.
ComplexRadialField second_component(const ComplexRadialField &u1, const ComplexRadialField *f1, Complex lambda);

/// Solution of A_lambda u = f in H^3 for Re lambda in (0, 3/4], direct Green's form.
ComplexRadialField resolvent_direct(const ComplexFn &f, Complex lambda, const GridPtr &grid,
                                    const SpectralOptions &opt = {});
ComplexRadialField resolvent_direct(const ComplexRadialField &f, Complex lambda, const SpectralOptions &opt = {});

/// Same solution from the integrated-by-parts form, valid for -3/4 <= Re lambda <= 3/4, lambda != 0.
ComplexRadialField resolvent_ibp(const ComplexFn &f, const ComplexFn &fprime, Complex lambda, const GridPtr &grid,
                                 const SpectralOptions &opt = {});
ComplexRadialField resolvent_ibp(const ComplexRadialField &f, Complex lambda, const SpectralOptions &opt = {});

/// Solution of the potential-free eigenvalue-1 equation
/// (rho^2-1) u'' + (6 rho - 4/rho) u' + 6 u = F1, F1 = f2 + 3 f1 + rho f1'.
RadialField lambda1_free_solve(const std::function<double(double)> &F1, const GridPtr &grid);
RadialField lambda1_free_solve(const RadialField &f1, const RadialField &f2);

}  // namespace wmlab

#endif  // WMLAB_SPECTRAL_HPP_
