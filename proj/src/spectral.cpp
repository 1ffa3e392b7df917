#include "wmlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace wmlab {

namespace {

using State2 = Dop853<2>::State;

auto spectral_field(Complex lambda) {
  return [lambda](double x, const State2 &y) {
    const auto d = ode_rhs(lambda, x, y[0], y[1]);
    return State2{d[0], d[1]};
  };
}

Complex cpow_real(double x, Complex p) { return std::exp(p * std::log(x)); }

}  // namespace

Complex spectral_operator(Complex lambda, double rho, Complex u, Complex du, Complex ddu) {
  const double q = 1.0 + rho * rho;
  const Complex c = (lambda + 1.0) * (lambda + 2.0);
  return (rho * rho - 1.0) * ddu + (2.0 * (lambda + 2.0) * rho - 4.0 / rho) * du + (c - 16.0 / (q * q)) * u;
}

std::array<Complex, 2> ode_rhs(Complex lambda, double rho, Complex u, Complex du) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("spectral ODE is singular at rho = 0 and rho = 1");
  const double q = 1.0 + rho * rho;
  const Complex c = (lambda + 1.0) * (lambda + 2.0);
  const Complex ddu =
      -((2.0 * (lambda + 2.0) * rho - 4.0 / rho) * du + (c - 16.0 / (q * q)) * u) / (rho * rho - 1.0);
  return {du, ddu};
}

// ---------------------------------------------------------------------------
// Frobenius series

namespace {

constexpr std::size_t kMaxTerms = 4000;

// Truncation test: three consecutive terms below 1e-16 of the running maximum
// of the partial sums.
struct Truncation {
  double max_sum = 0.0;
  int quiet = 0;
  bool done(double term, Complex partial) {
    max_sum = std::max(max_sum, std::abs(partial));
    if (!std::isfinite(term) || term > 1e200) throw SeriesDivergence("Frobenius coefficients blew up");
    quiet = term < 1e-16 * max_sum ? quiet + 1 : 0;
    return quiet >= 3;
  }
};

}  // namespace

SeriesSolution SeriesSolution::at_zero(Complex lambda, int sigma, double radius) {
  if (sigma != 0 && sigma != -3) throw std::invalid_argument("indices at rho = 0 are 0 and -3");
  if (!(radius > 0.0 && radius < 1.0)) throw std::invalid_argument("series radius must lie in (0, 1)");
  SeriesSolution s;
  s.center_ = 0;
  s.sigma_ = static_cast<double>(sigma);
  s.lambda_ = lambda;
  s.radius_ = radius;
  s.coeffs_.push_back(1.0);
  const double r2 = radius * radius;
  Truncation trunc;
  Complex partial = 1.0;
  double rpow = 1.0;
  trunc.done(1.0, partial);
  for (std::size_t m = 1; m < kMaxTerms; ++m) {
    const double sp = 2.0 * static_cast<double>(m) + sigma;
    Complex acc = (sp + lambda - 1.0) * (sp + lambda) * s.coeffs_[m - 1];
    double sign = 1.0;
    for (std::size_t k = 0; k < m; ++k, sign = -sign)
      acc -= 16.0 * sign * static_cast<double>(k + 1) * s.coeffs_[m - 1 - k];
    s.coeffs_.push_back(acc / (sp * (sp + 3.0)));
    rpow *= r2;
    const Complex term = s.coeffs_[m] * rpow;
    partial += term;
    if (trunc.done(std::abs(term), partial)) return s;
  }
  throw SeriesDivergence("Frobenius series at rho = 0 did not converge");
}

SeriesSolution SeriesSolution::at_one(Complex lambda, bool regular, double radius, double guard) {
  if (!(radius > 0.0 && radius < 1.0)) throw std::invalid_argument("series radius must lie in (0, 1)");
  const double g = guard * (1.0 - 1e-12);
  if (regular) {
    for (int J = 1; J <= 4; ++J)
      if (std::abs(lambda - (1.0 - J)) < g)
        throw ResonanceError("indicial roots at rho = 1 differ by an integer near this lambda");
  } else {
    for (int J = 0; J <= 4; ++J)
      if (std::abs(lambda - (1.0 + J)) < g)
        throw ResonanceError("second Frobenius solution at rho = 1 is degenerate near this lambda");
  }
  SeriesSolution s;
  s.center_ = 1;
  s.sigma_ = regular ? Complex(0.0) : 1.0 - lambda;
  s.lambda_ = lambda;
  s.radius_ = radius;
  const Complex sig = s.sigma_;
  const Complex c = (lambda + 1.0) * (lambda + 2.0);

  // Q(t) and R(t) coefficients of P u_tt + Q u_t + R u = 0.
  auto Q = [&](std::size_t k) -> Complex {
    if (k == 0) return -2.0 * lambda;
    if (k == 1) return 2.0 * lambda + 8.0;
    return 4.0;
  };
  std::vector<double> inv_h{0.5, 0.5};  // 1 / (2 - 2t + t^2)
  std::vector<Complex> R;
  auto grow_R = [&](std::size_t k) {
    while (inv_h.size() <= k) {
      const std::size_t j = inv_h.size();
      inv_h.push_back(inv_h[j - 1] - 0.5 * inv_h[j - 2]);
    }
    while (R.size() <= k) {
      const std::size_t j = R.size();
      double sq = 0.0;
      for (std::size_t i = 0; i <= j; ++i) sq += inv_h[i] * inv_h[j - i];
      R.push_back((j == 0 ? c : Complex(0.0)) - 16.0 * sq);
    }
  };

  auto &b = s.coeffs_;
  b.push_back(1.0);
  Truncation trunc;
  Complex partial = 1.0;
  double tpow = 1.0;
  trunc.done(1.0, partial);
  for (std::size_t J = 1; J < kMaxTerms; ++J) {
    grow_R(J);
    const Complex sJ = static_cast<double>(J) + sig;
    const Complex D = -2.0 * sJ * (sJ - 1.0 + lambda);
    Complex acc = b[J - 1] * (sJ - 1.0) * (sJ - 2.0);
    for (std::size_t k = 1; k <= J; ++k) acc += Q(k) * b[J - k] * (static_cast<double>(J - k) + sig);
    for (std::size_t k = 0; k < J; ++k) acc += R[k] * b[J - 1 - k];
    b.push_back(-acc / D);
    tpow *= radius;
    const Complex term = b[J] * tpow;
    partial += term;
    if (trunc.done(std::abs(term), partial)) return s;
  }
  throw SeriesDivergence("Frobenius series at rho = 1 did not converge");
}

std::pair<Complex, Complex> SeriesSolution::eval_local(double x) const {
  if (center_ == 0) {
    const double x2 = x * x;
    Complex u = 0.0, du = 0.0;
    // Horner in x^2 for the even part.
    for (std::size_t m = coeffs_.size(); m-- > 0;) {
      u = u * x2 + coeffs_[m];
      du = du * x2 + coeffs_[m] * (2.0 * static_cast<double>(m) + sigma_.real());
    }
    if (sigma_.real() == 0.0) return {u, x == 0.0 ? Complex(0.0) : du / x};
    const double x3 = x2 * x;
    return {u / x3, du / (x3 * x)};
  }
  // Center 1, x = t = 1 - rho; d/drho = -d/dt.
  Complex p = 0.0, dp = 0.0;
  for (std::size_t J = coeffs_.size(); J-- > 0;) {
    p = p * x + coeffs_[J];
    dp = dp * x + coeffs_[J] * (static_cast<double>(J) + sigma_);
  }
  if (sigma_ == 0.0) {
    // dp holds sum J b_J t^J; divide by t via the shifted sum.
    Complex q = 0.0;
    for (std::size_t J = coeffs_.size(); J-- > 1;) q = q * x + coeffs_[J] * static_cast<double>(J);
    return {p, -q};
  }
  if (x == 0.0) {
    const Complex e = sigma_ - 1.0;
    return {0.0, e.real() > 0.0 ? Complex(0.0) : Complex(HUGE_VAL, 0.0)};
  }
  const Complex ts = cpow_real(x, sigma_);
  return {ts * p, -ts * dp / x};
}

SolutionPair SeriesSolution::eval(double rho) const {
  const double x = center_ == 0 ? rho : 1.0 - rho;
  const auto [u, du] = eval_local(x);
  return {rho, u, du};
}

SolutionPair regular_solution_at_zero(Complex lambda, double rho_switch) {
  if (!(rho_switch > 0.0 && rho_switch <= 0.2)) throw std::domain_error("switch radius must lie in (0, 0.2]");
  return SeriesSolution::at_zero(lambda, 0, rho_switch).eval(rho_switch);
}

SolutionPair analytic_solution_at_one(Complex lambda, double rho_switch) {
  if (!(rho_switch >= 0.8 && rho_switch < 1.0)) throw std::domain_error("switch radius must lie in [0.8, 1)");
  return SeriesSolution::at_one(lambda, true, 1.0 - rho_switch).eval(rho_switch);
}

SolutionPair integrate_ode(Complex lambda, const SolutionPair &from, double to, OdeTolerance tol) {
  const double lo = std::min(from.rho, to), hi = std::max(from.rho, to);
  if (lo < 0.05 - 1e-15 || hi > 0.95 + 1e-15) throw std::domain_error("integration path must stay in [0.05, 0.95]");
  Dop853<2> ode(tol);
  double h = 0.0;
  const auto y = ode.integrate(spectral_field(lambda), from.rho, State2{from.u, from.du}, to, h);
  return {to, y[0], y[1]};
}

// ---------------------------------------------------------------------------
// Connection basis

namespace {

void check_lambda(Complex lambda, const SpectralOptions &opt) {
  if (opt.enforce_strip && (lambda.real() < -0.75 - 1e-12 || lambda.real() > 0.75 + 1e-12))
    throw std::domain_error("lambda outside the strip -3/4 <= Re lambda <= 3/4");
  if (std::abs(lambda) < opt.exclusion_radius * (1.0 - 1e-12))
    throw ResonanceError("lambda inside the exclusion disk around 0");
}

SolutionPair transport(Complex lambda, const SolutionPair &from, double to, OdeTolerance tol) {
  Dop853<2> ode(tol);
  double h = 0.0;
  const auto y = ode.integrate(spectral_field(lambda), from.rho, State2{from.u, from.du}, to, h);
  return {to, y[0], y[1]};
}

// Solve [a b; da db] x = [f; df].
std::pair<Complex, Complex> solve2(const SolutionPair &a, const SolutionPair &b, const SolutionPair &f) {
  const Complex det = a.u * b.du - a.du * b.u;
  return {(f.u * b.du - f.du * b.u) / det, (a.u * f.du - a.du * f.u) / det};
}

}  // namespace

SpectralBasis::SpectralBasis(Complex lambda, const SpectralOptions &opt, bool with_connection)
    : lambda_(lambda), opt_(opt) {
  check_lambda(lambda, opt);
  if (!(opt.switch0 < opt.rho_match && opt.rho_match < opt.switch1))
    throw std::invalid_argument("switch radii must bracket the matching point");
  u0s_ = SeriesSolution::at_zero(lambda, 0, opt.switch0);
  u1s_ = SeriesSolution::at_one(lambda, true, 1.0 - opt.switch1, opt.exclusion_radius);
  u0_sw_ = u0s_.eval(opt.switch0);
  u1_sw_ = u1s_.eval(opt.switch1);
  u0_match_ = transport(lambda, u0_sw_, opt.rho_match, opt.tol);
  u1_match_ = transport(lambda, u1_sw_, opt.rho_match, opt.tol);
  const double r = opt.rho_match;
  E_ = (u0_match_.u * u1_match_.du - u0_match_.du * u1_match_.u) * std::pow(r, 4) *
       cpow_real(1.0 - r * r, lambda);
  if (!with_connection) return;

  z0s_ = SeriesSolution::at_zero(lambda, -3, opt.switch0);
  z1s_ = SeriesSolution::at_one(lambda, false, 1.0 - opt.switch1, opt.exclusion_radius);
  const SolutionPair u1_at0 = transport(lambda, u1_match_, opt.switch0, opt.tol);
  const SolutionPair u0_at1 = transport(lambda, u0_match_, opt.switch1, opt.tol);
  std::tie(A_, B_) = solve2(u0_sw_, z0s_->eval(opt.switch0), u1_at0);
  std::tie(C_, D_) = solve2(u1_sw_, z1s_->eval(opt.switch1), u0_at1);
  connected_ = true;
}

std::vector<SpectralBasis::Values> SpectralBasis::at(const std::vector<RadialPoint> &pts) const {
  std::vector<Values> out(pts.size());
  const auto field = spectral_field(lambda_);
  Dop853<2> ode(opt_.tol);
  std::vector<std::size_t> mid;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double rho = pts[i].rho;
    if (i > 0 && rho < pts[i - 1].rho) throw std::invalid_argument("points must be sorted by rho");
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("rho outside [0, 1]");
    if (rho <= opt_.switch0) {
      if (!connected_) throw std::logic_error("basis built without connection data");
      const auto [u0, du0] = u0s_.eval_local(rho);
      const auto [z0, dz0] = z0s_->eval_local(rho);
      out[i] = {u0, du0, A_ * u0 + B_ * z0, A_ * du0 + B_ * dz0};
    } else if (rho >= opt_.switch1) {
      if (!connected_) throw std::logic_error("basis built without connection data");
      const auto [u1, du1] = u1s_.eval_local(pts[i].t);
      const auto [z1, dz1] = z1s_->eval_local(pts[i].t);
      out[i] = {C_ * u1 + D_ * z1, C_ * du1 + D_ * dz1, u1, du1};
    } else {
      mid.push_back(i);
    }
  }
  if (mid.empty()) return out;
  // u0 forward from switch0, u1 backward from switch1.
  double h = 0.0, x = opt_.switch0;
  State2 y{u0_sw_.u, u0_sw_.du};
  for (std::size_t i : mid) {
    y = ode.integrate(field, x, y, pts[i].rho, h);
    x = pts[i].rho;
    out[i].u0 = y[0];
    out[i].du0 = y[1];
  }
  h = 0.0;
  x = opt_.switch1;
  y = State2{u1_sw_.u, u1_sw_.du};
  for (auto it = mid.rbegin(); it != mid.rend(); ++it) {
    y = ode.integrate(field, x, y, pts[*it].rho, h);
    x = pts[*it].rho;
    out[*it].u1 = y[0];
    out[*it].du1 = y[1];
  }
  return out;
}

SpectralBasis::Values SpectralBasis::at(double rho) const {
  if (!connected_ && rho > opt_.switch0 && rho < opt_.switch1) {
    // Interior values need no connection data.
    const auto a = transport(lambda_, u0_sw_, rho, opt_.tol);
    const auto b = transport(lambda_, u1_sw_, rho, opt_.tol);
    return {a.u, a.du, b.u, b.du};
  }
  return at(std::vector<RadialPoint>{{rho, 1.0 - rho}})[0];
}

Complex SpectralBasis::normalized_wronskian(double rho) const {
  const Values v = at(rho);
  return (v.u0 * v.du1 - v.du0 * v.u1) * std::pow(rho, 4) * cpow_real(1.0 - rho * rho, lambda_);
}

double SpectralBasis::drift(const std::vector<double> &probes) const {
  double d = 0.0;
  for (double rho : probes) {
    const Values v = at(rho);
    const double w = std::pow(rho, 4) * std::abs(cpow_real(1.0 - rho * rho, lambda_));
    const Complex W = (v.u0 * v.du1 - v.du0 * v.u1) * std::pow(rho, 4) * cpow_real(1.0 - rho * rho, lambda_);
    const double scale = w * (std::abs(v.u0 * v.du1) + std::abs(v.du0 * v.u1));
    d = std::max(d, std::abs(W - E_) / scale);
  }
  return d;
}

ConnectionEvaluation connection_E(Complex lambda, const SpectralOptions &opt) {
  const SpectralBasis basis(lambda, opt, false);
  return {lambda, basis.E(), basis.drift({0.3, 0.4, 0.5, 0.6, 0.7})};
}

Complex connection_value(Complex lambda, const SpectralOptions &opt) {
  return SpectralBasis(lambda, opt, false).E();
}

// ---------------------------------------------------------------------------
// Argument principle

namespace {

using Path = std::function<Complex(double)>;

struct PathSample {
  double s;
  Complex E;
};

// Phase increment of E along path(s) for s in [a.s, b.s], bisecting until
// every sub-step changes the argument by less than pi/2.
double phase_increment(const Path &path, const ScanOptions &opt, PathSample a, PathSample b, int depth,
                       std::size_t &evals) {
  const double d = std::arg(b.E / a.E);
  if (std::abs(d) < 0.5 * std::numbers::pi) return d;
  if (depth >= opt.max_bisections) throw PhaseTrackingFailure("phase tracking did not resolve a contour segment");
  const double sm = 0.5 * (a.s + b.s);
  const PathSample m{sm, connection_value(path(sm), opt.spectral)};
  ++evals;
  if (m.E == 0.0) throw PhaseTrackingFailure("E vanishes on the contour");
  return phase_increment(path, opt, a, m, depth + 1, evals) + phase_increment(path, opt, m, b, depth + 1, evals);
}

// Runs body(i) for i in [0, count) on up to jobs threads with a static split.
template <typename Body>
void parallel_for(std::size_t count, unsigned jobs, Body &&body) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned j = 0; j < jobs; ++j) {
    pool.emplace_back([&, j] {
      try {
        for (std::size_t i = j; i < count; i += jobs) body(i);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

// Total phase change of E around a closed path s in [0, 1], in turns.
int path_winding(const Path &path, double length, const ScanOptions &opt, std::size_t &evals) {
  const std::size_t n = std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(length * opt.density)));
  std::vector<PathSample> samples(n + 1);
  parallel_for(n, opt.jobs, [&](std::size_t i) {
    const double s = static_cast<double>(i) / static_cast<double>(n);
    samples[i] = {s, connection_value(path(s), opt.spectral)};
  });
  samples[n] = {1.0, samples[0].E};
  evals += n;
  for (const auto &p : samples)
    if (p.E == 0.0) throw PhaseTrackingFailure("E vanishes on the contour");
  std::vector<double> inc(n);
  std::vector<std::size_t> extra(n, 0);
  parallel_for(n, opt.jobs, [&](std::size_t i) {
    inc[i] = phase_increment(path, opt, samples[i], samples[i + 1], 0, extra[i]);
  });
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += inc[i];
    evals += extra[i];
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

}  // namespace

int winding_circle(Complex center, double radius, const ScanOptions &opt, std::size_t *evals) {
  std::size_t count = 0;
  const Path path = [=](double s) { return center + radius * std::exp(Complex(0.0, 2.0 * std::numbers::pi * s)); };
  const int w = path_winding(path, 2.0 * std::numbers::pi * radius, opt, count);
  if (evals) *evals += count;
  return w;
}

ZeroRecord refine_zero(Complex seed, double step, const ScanOptions &opt) {
  Complex x0 = seed, x1 = seed + Complex(step, 0.5 * step);
  Complex f0 = connection_value(x0, opt.spectral), f1 = connection_value(x1, opt.spectral);
  int it = 0;
  for (; it < 60; ++it) {
    if (std::abs(f1) < opt.zero_tol) break;
    if (f1 == f0) break;
    const Complex x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = connection_value(x1, opt.spectral);
    if (std::abs(x1 - x0) < 1e-15 * std::max(1.0, std::abs(x1))) {
      ++it;
      break;
    }
  }
  return {x1, std::abs(f1), it};
}

ScanReport scan_rectangle(Complex lo, Complex hi, const std::vector<Disk> &exclusions, const ScanOptions &opt) {
  if (!(lo.real() < hi.real() && lo.imag() < hi.imag())) throw std::invalid_argument("rectangle corners out of order");
  if (opt.spectral.enforce_strip) {
    if (lo.real() < -0.74 - 1e-12 || hi.real() > 0.74 + 1e-12)
      throw std::domain_error("scan rectangle must satisfy -0.74 <= Re lambda <= 0.74");
    if (lo.imag() < -20.0 - 1e-12 || hi.imag() > 20.0 + 1e-12)
      throw std::domain_error("scan rectangle must satisfy |Im lambda| <= 20");
  }
  for (const auto &d : exclusions) {
    if (d.center.real() - d.radius <= lo.real() || d.center.real() + d.radius >= hi.real() ||
        d.center.imag() - d.radius <= lo.imag() || d.center.imag() + d.radius >= hi.imag())
      throw std::invalid_argument("exclusion disks must lie strictly inside the rectangle");
  }
  ScanReport rep;
  rep.lo = lo;
  rep.hi = hi;
  rep.exclusions = exclusions;

  const double w = hi.real() - lo.real(), h = hi.imag() - lo.imag();
  const double perimeter = 2.0 * (w + h);
  const std::array<Complex, 5> corners{lo, Complex(hi.real(), lo.imag()), hi, Complex(lo.real(), hi.imag()), lo};
  const std::array<double, 4> lens{w, h, w, h};
  const Path rect = [&](double s) {
    double d = s * perimeter;
    for (int k = 0; k < 4; ++k) {
      if (d <= lens[k] || k == 3) return corners[k] + (corners[k + 1] - corners[k]) * std::min(1.0, d / lens[k]);
      d -= lens[k];
    }
    return lo;
  };
  std::size_t evals = 0;
  int winding = path_winding(rect, perimeter, opt, evals);
  // Subtract what each excluded disk contributes (its boundary counted clockwise).
  for (const auto &d : exclusions) winding -= winding_circle(d.center, d.radius, opt, &evals);
  rep.winding = winding;

  if (winding != 0) {
    const std::size_t nx = std::max<std::size_t>(5, static_cast<std::size_t>(std::ceil(w * opt.grid_density)) + 1);
    const std::size_t ny = std::max<std::size_t>(5, static_cast<std::size_t>(std::ceil(h * opt.grid_density)) + 1);
    const double dx = w / static_cast<double>(nx - 1), dy = h / static_cast<double>(ny - 1);
    auto inside_disk = [&](Complex z) {
      for (const auto &d : exclusions)
        if (std::abs(z - d.center) <= d.radius) return true;
      return false;
    };
    std::vector<double> mag(nx * ny, HUGE_VAL);
    parallel_for(nx * ny, opt.jobs, [&](std::size_t k) {
      const Complex z(lo.real() + dx * static_cast<double>(k % nx), lo.imag() + dy * static_cast<double>(k / nx));
      if (!inside_disk(z)) mag[k] = std::abs(connection_value(z, opt.spectral));
    });
    evals += nx * ny;
    std::vector<std::pair<double, Complex>> seeds;
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const double m = mag[j * nx + i];
        if (!std::isfinite(m)) continue;
        bool is_min = true;
        for (int dj = -1; dj <= 1 && is_min; ++dj)
          for (int di = -1; di <= 1; ++di) {
            const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj;
            if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= static_cast<long>(nx) || jj >= static_cast<long>(ny))
              continue;
            if (mag[jj * nx + ii] < m) {
              is_min = false;
              break;
            }
          }
        if (is_min)
          seeds.push_back({m, Complex(lo.real() + dx * static_cast<double>(i), lo.imag() + dy * static_cast<double>(j))});
      }
    }
    std::sort(seeds.begin(), seeds.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    for (const auto &[m, z] : seeds) {
      ZeroRecord zr;
      try {
        zr = refine_zero(z, 0.1 * std::min(dx, dy), opt);
      } catch (const std::exception &) {
        continue;
      }
      const Complex x = zr.lambda;
      if (x.real() < lo.real() || x.real() > hi.real() || x.imag() < lo.imag() || x.imag() > hi.imag()) continue;
      if (inside_disk(x) || zr.abs_E > std::max(opt.zero_tol, 1e-8)) continue;
      bool dup = false;
      for (const auto &q : rep.zeros) dup = dup || std::abs(q.lambda - x) < 1e-6;
      if (!dup) rep.zeros.push_back(zr);
    }
    std::sort(rep.zeros.begin(), rep.zeros.end(), [](const ZeroRecord &a, const ZeroRecord &b) {
      return a.lambda.imag() < b.lambda.imag() || (a.lambda.imag() == b.lambda.imag() && a.lambda.real() < b.lambda.real());
    });
  }
  rep.evaluations = evals;
  return rep;
}

}  // namespace wmlab
