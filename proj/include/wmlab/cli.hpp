#ifndef WMLAB_CLI_HPP_
#define WMLAB_CLI_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wmlab/evolution.hpp"
#include "wmlab/spectral.hpp"

namespace wmlab {

enum class Scenario { verify, modes, resolvent, evolve, tune };

std::optional<Scenario> scenario_from_string(const std::string &s);
std::string to_string(Scenario s);

/// Additive perturbation of the blowup data.
/// shape: "bump" = (1-r^2)^2, "gauss" = exp(-10 r^2), "mode" = eigenmode data
/// (1/(1+r^2), 2/(1+r^2)^2) added to (f, g). target selects f, g or both for
/// the first two shapes.
struct Perturbation {
  double amplitude = 0.0;
  std::string shape = "bump";
  std::string target = "f";
};

struct RunConfig {
  Scenario scenario = Scenario::verify;

  // Evolution and tuning.
  std::size_t n = 513;
  double cfl = 0.4;
  double tau_max = 12.0;
  double T = 1.0;
  double data_T = 1.0;  // blowup time of the unperturbed data
  std::array<double, 2> bracket{0.8, 1.2};
  double tau_diag = 16.0;
  double tolerance = 1e-10;
  double decision_threshold = 0.5;
  std::size_t snapshot_stride = 16;
  double series_threshold = 1e-2;
  Perturbation perturbation{};

  // Spectral scans.
  Complex rect_lo{-0.74, -20.0};
  Complex rect_hi{0.74, 20.0};
  double exclusion_radius = 0.05;
  double density = 4.0;
  double grid_density = 10.0;
  bool enforce_strip = true;

  // Resolvent checks.
  std::vector<Complex> lambdas{Complex(0.5, 0.0), Complex(0.5, 3.0)};

  // Randomised property checks.
  std::uint64_t seed = 42;
  std::size_t samples = 1000;

  std::string out = "out";
  unsigned jobs = 1;
};

/// Invalid or malformed configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds a validated config from JSON. A scenario passed explicitly wins over
/// a missing key and must agree with a present one.
RunConfig parse_config(const nlohmann::json &j, std::optional<Scenario> scenario = std::nullopt);
RunConfig load_config(const std::string &path, std::optional<Scenario> scenario = std::nullopt);
void validate(const RunConfig &cfg);
nlohmann::json to_json(const RunConfig &cfg);

struct Check {
  std::string name;
  std::string anchor;  // the mathematical statement being checked
  double value;
  double tol;
  bool pass;
};

/// value <= tol.
Check check_le(std::string name, std::string anchor, double value, double tol);
/// value >= tol.
Check check_ge(std::string name, std::string anchor, double value, double tol);

struct Report {
  Scenario scenario = Scenario::verify;
  std::vector<Check> checks;
  nlohmann::json summary = nlohmann::json::object();
  std::string error;  // set when the scenario aborted with an exception

  bool pass() const;
  nlohmann::json to_json() const;
};

/// Closed-form identity checks of the profile module.
std::vector<Check> profile_checks(std::uint64_t seed);
/// Energy-form, dissipativity, Sobolev and Hardy checks of the norms module.
std::vector<Check> norms_checks(std::uint64_t seed, std::size_t samples);

InitialData make_initial_data(const RunConfig &cfg);
EvolutionConfig evolution_config(const RunConfig &cfg);
ScanOptions scan_options(const RunConfig &cfg);

/// Runs the scenario and returns the report; writes the CSV artifacts to cfg.out.
Report run_scenario(const RunConfig &cfg);
/// run_scenario plus report.json; returns 0 if every check passes, 1 otherwise.
int run(const RunConfig &cfg);

/// Fixed 17-significant-digit formatting used for every CSV value.
std::string format_number(double x);
void write_trace_csv(const std::string &path, const EvolutionTrace &trace);
void write_tune_csv(const std::string &path, const TuningResult &result);

}  // namespace wmlab

#endif  // WMLAB_CLI_HPP_
