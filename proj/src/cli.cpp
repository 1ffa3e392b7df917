#include "wmlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "wmlab/norms.hpp"
#include "wmlab/profile.hpp"

namespace wmlab {

using nlohmann::json;

std::optional<Scenario> scenario_from_string(const std::string &s) {
  if (s == "verify") return Scenario::verify;
  if (s == "modes") return Scenario::modes;
  if (s == "resolvent") return Scenario::resolvent;
  if (s == "evolve") return Scenario::evolve;
  if (s == "tune") return Scenario::tune;
  return std::nullopt;
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::verify: return "verify";
    case Scenario::modes: return "modes";
    case Scenario::resolvent: return "resolvent";
    case Scenario::evolve: return "evolve";
    case Scenario::tune: return "tune";
  }
  return "verify";
}

namespace {

template <typename T>
T get_as(const json &j, const std::string &key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

Complex get_complex(const json &j, const std::string &key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("config key '" + key + "' must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

void require_keys(const json &j, const std::set<std::string> &allowed, const std::string &where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto &[k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown config key '" + k + "' in " + where);
}

bool in_T_range(double T) { return T >= 0.5 && T <= 1.5; }

}  // namespace

RunConfig parse_config(const json &j, std::optional<Scenario> scenario) {
  static const std::set<std::string> keys = {
      "scenario", "n", "cfl", "tau_max", "T", "data_T", "bracket", "tau_diag", "tolerance",
      "decision_threshold", "snapshot_stride", "series_threshold", "perturbation", "rectangle",
      "exclusion_radius", "density", "grid_density", "enforce_strip", "lambdas", "seed", "samples",
      "out", "jobs"};
  require_keys(j, keys, "config");
  RunConfig c;
  if (j.contains("scenario")) {
    const auto s = scenario_from_string(get_as<std::string>(j, "scenario"));
    if (!s) throw ConfigError("unknown scenario '" + j["scenario"].get<std::string>() + "'");
    if (scenario && *scenario != *s)
      throw ConfigError("config scenario '" + to_string(*s) + "' disagrees with subcommand '" +
                        to_string(*scenario) + "'");
    c.scenario = *s;
  } else if (scenario) {
    c.scenario = *scenario;
  } else {
    throw ConfigError("config key 'scenario' is required");
  }

  if (j.contains("n")) c.n = get_as<std::size_t>(j, "n");
  if (j.contains("cfl")) c.cfl = get_as<double>(j, "cfl");
  if (j.contains("tau_max")) c.tau_max = get_as<double>(j, "tau_max");
  if (j.contains("T")) c.T = get_as<double>(j, "T");
  if (j.contains("data_T")) c.data_T = get_as<double>(j, "data_T");
  if (j.contains("bracket")) {
    const auto b = get_as<std::vector<double>>(j, "bracket");
    if (b.size() != 2) throw ConfigError("config key 'bracket' must hold two numbers");
    c.bracket = {b[0], b[1]};
  }
  if (j.contains("tau_diag")) c.tau_diag = get_as<double>(j, "tau_diag");
  if (j.contains("tolerance")) c.tolerance = get_as<double>(j, "tolerance");
  if (j.contains("decision_threshold")) c.decision_threshold = get_as<double>(j, "decision_threshold");
  if (j.contains("snapshot_stride")) c.snapshot_stride = get_as<std::size_t>(j, "snapshot_stride");
  if (j.contains("series_threshold")) c.series_threshold = get_as<double>(j, "series_threshold");
  if (j.contains("perturbation")) {
    const json &p = j["perturbation"];
    require_keys(p, {"amplitude", "shape", "target"}, "perturbation");
    if (p.contains("amplitude")) c.perturbation.amplitude = get_as<double>(p, "amplitude");
    if (p.contains("shape")) c.perturbation.shape = get_as<std::string>(p, "shape");
    if (p.contains("target")) c.perturbation.target = get_as<std::string>(p, "target");
  }
  if (j.contains("rectangle")) {
    const json &r = j["rectangle"];
    require_keys(r, {"lo", "hi"}, "rectangle");
    if (r.contains("lo")) c.rect_lo = get_complex(r["lo"], "rectangle.lo");
    if (r.contains("hi")) c.rect_hi = get_complex(r["hi"], "rectangle.hi");
  }
  if (j.contains("exclusion_radius")) c.exclusion_radius = get_as<double>(j, "exclusion_radius");
  if (j.contains("density")) c.density = get_as<double>(j, "density");
  if (j.contains("grid_density")) c.grid_density = get_as<double>(j, "grid_density");
  if (j.contains("enforce_strip")) c.enforce_strip = get_as<bool>(j, "enforce_strip");
  if (j.contains("lambdas")) {
    if (!j["lambdas"].is_array()) throw ConfigError("config key 'lambdas' must be an array");
    c.lambdas.clear();
    for (const auto &l : j["lambdas"]) c.lambdas.push_back(get_complex(l, "lambdas"));
  }
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("samples")) c.samples = get_as<std::size_t>(j, "samples");
  if (j.contains("out")) c.out = get_as<std::string>(j, "out");
  if (j.contains("jobs")) c.jobs = get_as<unsigned>(j, "jobs");
  validate(c);
  return c;
}

RunConfig load_config(const std::string &path, std::optional<Scenario> scenario) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, scenario);
}

void validate(const RunConfig &c) {
  const auto fail = [](const std::string &m) { throw ConfigError(m); };
  if (c.n < 33 || c.n % 2 == 0) fail("n must be an odd integer >= 33");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) fail("cfl must lie in (0, 1]");
  if (!(c.tau_max > 0.0)) fail("tau_max must be positive");
  if (!in_T_range(c.T)) fail("T must lie in [1/2, 3/2]");
  if (!in_T_range(c.data_T)) fail("data_T must lie in [1/2, 3/2]");
  if (!(in_T_range(c.bracket[0]) && in_T_range(c.bracket[1]) && c.bracket[0] < c.bracket[1]))
    fail("bracket must be an increasing pair inside [1/2, 3/2]");
  if (!(c.tau_diag > 0.0)) fail("tau_diag must be positive");
  if (!(c.tolerance > 0.0)) fail("tolerance must be positive");
  if (!(c.decision_threshold > 0.0)) fail("decision_threshold must be positive");
  if (c.snapshot_stride == 0) fail("snapshot_stride must be at least 1");
  if (!(c.series_threshold > 0.0)) fail("series_threshold must be positive");
  if (!std::isfinite(c.perturbation.amplitude)) fail("perturbation.amplitude must be finite");
  const auto &sh = c.perturbation.shape;
  if (sh != "bump" && sh != "gauss" && sh != "mode") fail("perturbation.shape must be bump, gauss or mode");
  const auto &tg = c.perturbation.target;
  if (tg != "f" && tg != "g" && tg != "both") fail("perturbation.target must be f, g or both");
  if (!(c.rect_lo.real() < c.rect_hi.real() && c.rect_lo.imag() < c.rect_hi.imag()))
    fail("rectangle lo must lie strictly below and left of hi");
  if (c.enforce_strip) {
    if (c.rect_lo.real() < -0.74 || c.rect_hi.real() > 0.74) fail("rectangle real part must lie in [-0.74, 0.74]");
    if (c.rect_lo.imag() < -20.0 || c.rect_hi.imag() > 20.0) fail("rectangle imaginary part must lie in [-20, 20]");
  }
  if (!(c.exclusion_radius > 0.0)) fail("exclusion_radius must be positive");
  if (!(c.density > 0.0 && c.grid_density > 0.0)) fail("density and grid_density must be positive");
  for (const auto &l : c.lambdas) {
    if (!(l.real() >= -0.75 && l.real() <= 0.75)) fail("lambdas must satisfy -3/4 <= Re lambda <= 3/4");
    if (std::abs(l) < c.exclusion_radius) fail("lambdas must lie outside the exclusion disk around 0");
  }
  if (c.samples == 0) fail("samples must be at least 1");
  if (c.out.empty()) fail("out must be a directory path");
  if (c.jobs == 0) fail("jobs must be at least 1");
}

json to_json(const RunConfig &c) {
  json lambdas = json::array();
  for (const auto &l : c.lambdas) lambdas.push_back({l.real(), l.imag()});
  return {{"scenario", to_string(c.scenario)},
          {"n", c.n},
          {"cfl", c.cfl},
          {"tau_max", c.tau_max},
          {"T", c.T},
          {"data_T", c.data_T},
          {"bracket", {c.bracket[0], c.bracket[1]}},
          {"tau_diag", c.tau_diag},
          {"tolerance", c.tolerance},
          {"decision_threshold", c.decision_threshold},
          {"snapshot_stride", c.snapshot_stride},
          {"series_threshold", c.series_threshold},
          {"perturbation",
           {{"amplitude", c.perturbation.amplitude}, {"shape", c.perturbation.shape}, {"target", c.perturbation.target}}},
          {"rectangle", {{"lo", {c.rect_lo.real(), c.rect_lo.imag()}}, {"hi", {c.rect_hi.real(), c.rect_hi.imag()}}}},
          {"exclusion_radius", c.exclusion_radius},
          {"density", c.density},
          {"grid_density", c.grid_density},
          {"enforce_strip", c.enforce_strip},
          {"lambdas", lambdas},
          {"seed", c.seed},
          {"samples", c.samples},
          {"out", c.out},
          {"jobs", c.jobs}};
}

Check check_le(std::string name, std::string anchor, double value, double tol) {
  return {std::move(name), std::move(anchor), value, tol, value <= tol};
}

Check check_ge(std::string name, std::string anchor, double value, double tol) {
  return {std::move(name), std::move(anchor), value, tol, value >= tol};
}

bool Report::pass() const {
  return error.empty() && std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.pass; });
}

json Report::to_json() const {
  json rows = json::array();
  for (const auto &c : checks)
    rows.push_back({{"name", c.name}, {"anchor", c.anchor}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass}});
  json j = {{"scenario", wmlab::to_string(scenario)}, {"pass", pass()}, {"checks", rows}, {"summary", summary}};
  if (!error.empty()) j["error"] = error;
  return j;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void write_rows(const std::string &path, const std::string &header, const std::vector<std::vector<double>> &rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << header << '\n';
  for (const auto &r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << format_number(r[k]);
    out << '\n';
  }
}

}  // namespace

void write_trace_csv(const std::string &path, const EvolutionTrace &trace) {
  std::vector<std::vector<double>> rows;
  for (const auto &r : trace.rows)
    rows.push_back({r.tau, r.linf_phi1, r.l2_phi1, r.l10_phi1, r.h1_Phi, r.h2_Phi, r.s1_partial, r.s2_partial, r.a_coeff});
  write_rows(path, "tau,linf_phi1,l2_phi1,l10_phi1,h1_Phi,h2_Phi,s1_partial,s2_partial,a_coeff", rows);
}

void write_tune_csv(const std::string &path, const TuningResult &result) {
  std::vector<std::vector<double>> rows;
  for (const auto &s : result.history)
    rows.push_back({static_cast<double>(s.iter), s.t_lo, s.t_hi, s.t_mid, static_cast<double>(s.sign), s.tau_diag});
  write_rows(path, "iter,t_lo,t_hi,t_mid,sign,tau_diag", rows);
}

InitialData make_initial_data(const RunConfig &cfg) {
  InitialData d = blowup_data(cfg.data_T, 2.0);
  const double eps = cfg.perturbation.amplitude;
  if (eps == 0.0) return d;
  const auto base_f = d.f, base_g = d.g;
  if (cfg.perturbation.shape == "mode") {
    d.f = [=](double r) { return base_f(r) + eps * eigenfunction_g(r).first; };
    d.g = [=](double r) { return base_g(r) + eps * eigenfunction_g(r).second; };
    return d;
  }
  std::function<double(double)> shape;
  if (cfg.perturbation.shape == "bump")
    shape = [](double r) { return (1 - r * r) * (1 - r * r); };
  else
    shape = [](double r) { return std::exp(-10 * r * r); };
  const bool on_f = cfg.perturbation.target != "g", on_g = cfg.perturbation.target != "f";
  if (on_f) d.f = [=](double r) { return base_f(r) + eps * shape(r); };
  if (on_g) d.g = [=](double r) { return base_g(r) + eps * shape(r); };
  return d;
}

EvolutionConfig evolution_config(const RunConfig &cfg) {
  EvolutionConfig e;
  e.n = cfg.n;
  e.cfl = cfg.cfl;
  e.tau_max = cfg.tau_max;
  e.T = cfg.T;
  e.series_threshold = cfg.series_threshold;
  e.snapshot_stride = cfg.snapshot_stride;
  return e;
}

ScanOptions scan_options(const RunConfig &cfg) {
  ScanOptions o;
  o.spectral.exclusion_radius = cfg.exclusion_radius;
  o.spectral.enforce_strip = cfg.enforce_strip;
  o.density = cfg.density;
  o.grid_density = cfg.grid_density;
  o.jobs = cfg.jobs;
  return o;
}

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::string path_in(const RunConfig &cfg, const std::string &file) {
  return (std::filesystem::path(cfg.out) / file).string();
}

// Max relative residual of A_lambda u - F over interior nodes, with
// sixth-order centred differences independent of the solver.
double resolvent_residual(const ComplexRadialField &u, const std::function<Complex(double)> &F,
                          const std::function<Complex(double, Complex, Complex, Complex)> &op) {
  static const double offs[] = {-3, -2, -1, 0, 1, 2, 3};
  static const auto w1 = fd_weights(0.0, offs, 1), w2 = fd_weights(0.0, offs, 2);
  const Grid &g = u.grid();
  const double h = g.spacing();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 3; i + 3 < g.size(); ++i) {
    Complex d1 = 0.0, d2 = 0.0;
    for (int k = 0; k < 7; ++k) {
      d1 += w1[k] * u[i + k - 3];
      d2 += w2[k] * u[i + k - 3];
    }
    const double r = g.node(i);
    num = std::max(num, std::abs(op(r, u[i], d1 / h, d2 / (h * h)) - F(r)));
    den = std::max(den, std::abs(F(r)));
  }
  return num / den;
}

struct TraceSummary {
  double max_norm = 0.0;  // over rows with tau <= horizon
  double horizon_reached = 0.0;
};

TraceSummary trace_norms(const EvolutionTrace &t, double horizon) {
  TraceSummary s;
  for (const auto &r : t.rows) {
    if (r.tau > horizon + 1e-12) break;
    s.max_norm = std::max({s.max_norm, r.linf_phi1, r.l2_phi1, r.l10_phi1, r.h1_Phi, r.h2_Phi, std::abs(r.a_coeff)});
    s.horizon_reached = r.tau;
  }
  return s;
}

double tail_fraction(const EvolutionTrace &t, double frac, bool s1) {
  if (t.rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double cut = frac * t.rows.back().tau;
  double at_cut = 0.0;
  for (const auto &r : t.rows)
    if (r.tau <= cut + 1e-12) at_cut = s1 ? r.s1_partial : r.s2_partial;
  const double total = s1 ? t.rows.back().s1_partial : t.rows.back().s2_partial;
  return total > 0.0 ? 1.0 - at_cut / total : 0.0;
}

json trace_summary(const EvolutionTrace &t) {
  json j = {{"rows", t.rows.size()}, {"aborted", t.aborted}, {"final_tau", t.final_tau}, {"side", t.side}};
  if (!t.rows.empty()) {
    const auto &r = t.rows.back();
    j["final"] = {{"linf_phi1", r.linf_phi1}, {"a_coeff", r.a_coeff}, {"s1", r.s1_partial}, {"s2", r.s2_partial}};
  }
  return j;
}

void columns(const EvolutionTrace &t, std::vector<double> &tau, std::vector<double> &linf, std::vector<double> &a) {
  for (const auto &r : t.rows) {
    tau.push_back(r.tau);
    linf.push_back(r.linf_phi1);
    a.push_back(r.a_coeff);
  }
}

double safe_slope(const std::vector<double> &tau, const std::vector<double> &v, double lo, double hi) {
  try {
    return fit_log_slope(tau, v, lo, hi);
  } catch (const std::exception &) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

bool is_exact_data(const RunConfig &cfg) { return cfg.perturbation.amplitude == 0.0; }

Report run_verify(const RunConfig &cfg) {
  Report rep;
  rep.checks = profile_checks(cfg.seed);
  const std::size_t nprofile = rep.checks.size();
  auto norms = norms_checks(cfg.seed, cfg.samples);
  rep.checks.insert(rep.checks.end(), norms.begin(), norms.end());
  rep.summary = {{"profile_checks", nprofile}, {"norms_checks", norms.size()}, {"seed", cfg.seed},
                 {"samples", cfg.samples}};
  return rep;
}

Report run_modes(const RunConfig &cfg) {
  Report rep;
  ScanOptions opt = scan_options(cfg);

  // Eigenvalue 1 lies outside the strip, so the anchor checks lift the restriction.
  ScanOptions free_opt = opt;
  free_opt.spectral.enforce_strip = false;
  const auto e1 = connection_E(1.0, free_opt.spectral);
  rep.checks.push_back(check_le("E_at_1", "E(1) = 0 for the normalised basis", std::abs(e1.E), 1e-8));
  const int w1 = winding_circle(1.0, 0.1, free_opt);
  rep.checks.push_back(check_le("winding_at_1", "winding of E on |lambda-1| = 0.1 equals 1",
                                std::abs(w1 - 1.0), 0.0));

  const Complex lc(0.3, 2.0);
  const Complex ea = connection_value(lc, opt.spectral), eb = connection_value(std::conj(lc), opt.spectral);
  rep.checks.push_back(check_le("conjugation", "E(conj lambda) = conj E(lambda)",
                                std::abs(eb - std::conj(ea)) / std::abs(ea), 1e-10));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> re(-0.74, 0.74), im(-20.0, 20.0);
  const auto probes = linspace(0.2, 0.8, 13);
  double drift = 0.0;
  for (int k = 0; k < 20;) {
    const Complex l(re(rng), im(rng));
    if (std::abs(l) <= 2 * cfg.exclusion_radius) continue;
    drift = std::max(drift, SpectralBasis(l, opt.spectral).drift(probes));
    ++k;
  }
  rep.checks.push_back(check_le("wronskian_constancy", "W(u0,u1) rho^4 (1-rho^2)^lambda constant on [0.2,0.8]",
                                drift, 1e-8));

  const std::vector<Disk> disks{{0.0, cfg.exclusion_radius}};
  const auto scan = scan_rectangle(cfg.rect_lo, cfg.rect_hi, disks, opt);

  // Contour samples along the rectangle boundary for modes.csv.
  std::vector<std::vector<double>> mrows;
  const Complex corners[] = {cfg.rect_lo, {cfg.rect_hi.real(), cfg.rect_lo.imag()}, cfg.rect_hi,
                             {cfg.rect_lo.real(), cfg.rect_hi.imag()}};
  for (int s = 0; s < 4; ++s) {
    const Complex a = corners[s], b = corners[(s + 1) % 4];
    const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(b - a) * cfg.density)));
    for (std::size_t i = 0; i < m; ++i) {
      const Complex l = a + (b - a) * (static_cast<double>(i) / static_cast<double>(m));
      const auto ev = connection_E(l, opt.spectral);
      mrows.push_back({l.real(), l.imag(), std::abs(ev.E), ev.wronskian_drift});
    }
  }
  write_rows(path_in(cfg, "modes.csv"), "re_lambda,im_lambda,abs_E,drift", mrows);

  std::vector<std::vector<double>> zrows;
  json zeros = json::array();
  for (const auto &z : scan.zeros) {
    zrows.push_back({z.lambda.real(), z.lambda.imag(), z.abs_E, static_cast<double>(z.iters)});
    const auto ev = connection_E(z.lambda, opt.spectral);
    zeros.push_back({{"re", z.lambda.real()}, {"im", z.lambda.imag()}, {"abs_E_refined", z.abs_E},
                     {"iters", z.iters}, {"drift", ev.wronskian_drift},
                     {"winding_r0.01", winding_circle(z.lambda, 0.01, opt)}});
  }
  write_rows(path_in(cfg, "zeros.csv"), "re,im,abs_E_refined,iters", zrows);

  rep.checks.push_back(check_le("strip_winding", "no zeros of E in the strip minus the disk at 0",
                                std::abs(static_cast<double>(scan.winding)), 0.0));
  rep.checks.push_back(check_le("strip_zero_count", "zero list empty",
                                static_cast<double>(scan.zeros.size()), 0.0));
  rep.summary = {{"rectangle", {{"lo", {scan.lo.real(), scan.lo.imag()}}, {"hi", {scan.hi.real(), scan.hi.imag()}}}},
                 {"exclusion_radius", cfg.exclusion_radius},
                 {"winding", scan.winding},
                 {"zero_count", scan.zeros.size()},
                 {"zeros", zeros},
                 {"evaluations", scan.evaluations},
                 {"E_at_1", std::abs(e1.E)},
                 {"winding_at_1", w1},
                 {"max_drift", drift}};
  return rep;
}

Report run_resolvent(const RunConfig &cfg) {
  Report rep;
  const auto grid = Grid::make(cfg.n);
  struct Rhs {
    std::string name;
    std::function<Complex(double)> f, df;
  };
  const std::vector<Rhs> rhs = {
      {"1-rho^2", [](double r) { return Complex(1 - r * r); }, [](double r) { return Complex(-2 * r); }},
      {"cos(pi rho)", [](double r) { return Complex(std::cos(std::numbers::pi * r)); },
       [](double r) { return Complex(-std::numbers::pi * std::sin(std::numbers::pi * r)); }}};
  const auto tag = [](Complex l) {
    return format_number(l.real()) + (l.imag() < 0 ? "" : "+") + format_number(l.imag()) + "i";
  };
  json rows = json::array();
  const auto residual_of = [&](const ComplexRadialField &u, const Rhs &r, Complex lam) {
    return resolvent_residual(u, r.f, [lam](double rho, Complex v, Complex dv, Complex ddv) {
      return spectral_operator(lam, rho, v, dv, ddv);
    });
  };

  for (const Complex lam : cfg.lambdas) {
    for (const auto &r : rhs) {
      const auto ibp = resolvent_ibp(r.f, r.df, lam, grid);
      const double ri = residual_of(ibp, r, lam);
      rep.checks.push_back(check_le("resolvent_ibp_residual[" + tag(lam) + "," + r.name + "]",
                                    "A_lambda R f = f", ri, 1e-6));
      json row = {{"lambda", {lam.real(), lam.imag()}}, {"f", r.name}, {"ibp_residual", ri}};
      if (lam.real() > 0.0) {
        const auto dir = resolvent_direct(r.f, lam, grid);
        const double rd = residual_of(dir, r, lam);
        rep.checks.push_back(check_le("resolvent_direct_residual[" + tag(lam) + "," + r.name + "]",
                                      "A_lambda R f = f", rd, 1e-6));
        row["direct_residual"] = rd;
      }
      rows.push_back(row);
    }
  }

  const Complex lam_eq(0.5, 2.0);
  double diff = 0.0;
  for (const auto &r : rhs) {
    const auto a = resolvent_direct(r.f, lam_eq, grid);
    const auto b = resolvent_ibp(r.f, r.df, lam_eq, grid);
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  rep.checks.push_back(check_le("direct_vs_ibp", "direct and integrated-by-parts forms agree at 1/2+2i", diff, 1e-6));

  const Complex lam_left(-0.5, 4.0);
  double rl = 0.0;
  for (const auto &r : rhs) rl = std::max(rl, residual_of(resolvent_ibp(r.f, r.df, lam_left, grid), r, lam_left));
  rep.checks.push_back(check_le("resolvent_left_half", "A_lambda R f = f at -1/2+4i", rl, 1e-6));

  // Eigenvalue-1 free problem with F1 = f2 + 3 f1 + rho f1', f1 = 1-rho^2, f2 = cos(pi rho).
  const auto F1 = [](double r) { return std::cos(std::numbers::pi * r) + 3 - 5 * r * r; };
  const auto u = lambda1_free_solve(F1, grid);
  const auto free_op = [](double r, Complex v, Complex dv, Complex ddv) {
    return (r * r - 1) * ddv + (6 * r - 4 / r) * dv + 6.0 * v;
  };
  const double r1 = resolvent_residual(to_complex(u), [&](double r) { return Complex(F1(r)); }, free_op);
  rep.checks.push_back(check_le("lambda1_free_residual", "(rho^2-1)u'' + (6rho-4/rho)u' + 6u = F1", r1, 1e-7));
  const auto uf = lambda1_free_solve(RadialField::sample(grid, [](double r) { return 1 - r * r; }),
                                     RadialField::sample(grid, [](double r) { return std::cos(std::numbers::pi * r); }));
  double fd = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    fd = std::max(fd, std::abs(u[i] - uf[i]));
    scale = std::max(scale, std::abs(u[i]));
  }
  rep.checks.push_back(check_le("lambda1_field_form", "field and closed-form F1 give the same solution",
                                fd / scale, 1e-6));
  rep.summary = {{"n", cfg.n}, {"rows", rows}, {"direct_vs_ibp", diff}, {"lambda1_residual", r1}};
  return rep;
}

Report run_evolve(const RunConfig &cfg) {
  Report rep;
  const auto ecfg = evolution_config(cfg);
  const auto trace = evolve(ecfg, make_initial_data(cfg));
  write_trace_csv(path_in(cfg, "trace.csv"), trace);
  std::vector<double> tau, linf, a;
  columns(trace, tau, linf, a);
  rep.summary = trace_summary(trace);
  if (is_exact_data(cfg) && cfg.T == cfg.data_T) {
    const double horizon = std::min(10.0, cfg.tau_max);
    const auto s = trace_norms(trace, horizon);
    rep.checks.push_back(check_le("exact_data_norms", "Phi stays below 1e-5 for the exact profile data",
                                  trace.aborted ? std::numeric_limits<double>::infinity() : s.max_norm, 1e-5));
    rep.summary["horizon_reached"] = s.horizon_reached;
  } else {
    const double rate = safe_slope(tau, a, 4.0, 8.0);
    rep.checks.push_back(check_le("unstable_rate", "log|a(tau)| grows at rate 1 on [4,8]", std::abs(rate - 1.0),
                                  0.05));
    rep.summary["growth_rate"] = rate;
  }
  return rep;
}

Report run_tune(const RunConfig &cfg) {
  Report rep;
  const auto data = make_initial_data(cfg);
  auto ecfg = evolution_config(cfg);
  TuningOptions topt;
  topt.tolerance = cfg.tolerance;
  topt.tau_diag = cfg.tau_diag;
  topt.decision_threshold = cfg.decision_threshold;
  topt.jobs = cfg.jobs;
  const auto res = tune_T(ecfg, data, cfg.bracket[0], cfg.bracket[1], topt);
  write_tune_csv(path_in(cfg, "tune.csv"), res);

  int nesting = 0;
  for (std::size_t k = 1; k < res.history.size(); ++k) {
    const auto &p = res.history[k - 1], &q = res.history[k];
    if (q.t_lo < p.t_lo || q.t_hi > p.t_hi || q.t_hi - q.t_lo >= p.t_hi - p.t_lo) ++nesting;
  }
  const double width = res.history.empty() ? std::numeric_limits<double>::infinity()
                                           : res.history.back().t_hi - res.history.back().t_lo;
  rep.checks.push_back(check_le("brackets_nested", "brackets nested and shrinking", nesting, 0.0));
  rep.checks.push_back(check_le("bracket_width", "final bracket width below tolerance", width, cfg.tolerance));

  ecfg.T = res.t_star;
  const auto trace = evolve(ecfg, data);
  write_trace_csv(path_in(cfg, "trace.csv"), trace);
  std::vector<double> tau, linf, a;
  columns(trace, tau, linf, a);
  rep.summary = {{"t_star", res.t_star}, {"iterations", res.history.size()}, {"tau_diag", res.tau_diag},
                 {"width", width}, {"tuned_run", trace_summary(trace)}};
  if (is_exact_data(cfg)) {
    rep.checks.push_back(check_le("t_star_exact", "T* equals the data blowup time",
                                  std::abs(res.t_star - cfg.data_T), 1e-8));
    const auto s = trace_norms(trace, std::min(10.0, cfg.tau_max));
    rep.checks.push_back(check_le("exact_data_norms", "Phi stays below 1e-5 for the exact profile data",
                                  trace.aborted ? std::numeric_limits<double>::infinity() : s.max_norm, 1e-5));
  } else {
    const double rate = -safe_slope(tau, linf, 3.0, 9.0);
    const double t1 = tail_fraction(trace, 0.8, true), t2 = tail_fraction(trace, 0.8, false);
    rep.checks.push_back(check_le("tuned_run_completed", "tuned run reaches tau_max without blowup",
                                  trace.aborted ? 1.0 : 0.0, 0.0));
    rep.checks.push_back(check_ge("decay_rate", "|phi1|_inf decays on [3,9]", rate,
                                  std::numeric_limits<double>::min()));
    rep.checks.push_back(check_le("s1_tail", "last 20% of S1 below 1% of total", t1, 0.01));
    rep.checks.push_back(check_le("s2_tail", "last 20% of S2 below 1% of total", t2, 0.01));
    rep.summary["decay_rate"] = rate;
    rep.summary["s1_tail"] = t1;
    rep.summary["s2_tail"] = t2;
  }
  return rep;
}

}  // namespace

Report run_scenario(const RunConfig &cfg) {
  validate(cfg);
  std::filesystem::create_directories(cfg.out);
  Report rep;
  switch (cfg.scenario) {
    case Scenario::verify: rep = run_verify(cfg); break;
    case Scenario::modes: rep = run_modes(cfg); break;
    case Scenario::resolvent: rep = run_resolvent(cfg); break;
    case Scenario::evolve: rep = run_evolve(cfg); break;
    case Scenario::tune: rep = run_tune(cfg); break;
  }
  rep.scenario = cfg.scenario;
  return rep;
}

int run(const RunConfig &cfg) {
  validate(cfg);
  Report rep;
  try {
    rep = run_scenario(cfg);
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception &e) {
    rep = Report{};
    rep.scenario = cfg.scenario;
    rep.error = e.what();
  }
  json j = rep.to_json();
  j["config"] = to_json(cfg);
  std::filesystem::create_directories(cfg.out);
  std::ofstream out(path_in(cfg, "report.json"));
  if (!out) throw std::runtime_error("cannot write report.json");
  out << j.dump(2) << '\n';
  return rep.pass() ? 0 : 1;
}

}  // namespace wmlab
