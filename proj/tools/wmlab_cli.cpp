#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wmlab/cli.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Self-similar wave maps blowup laboratory"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomised checks");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  for (const char *name : {"verify", "modes", "resolvent", "evolve", "tune"}) {
    app.add_subcommand(name)->fallthrough();
  }
  app.get_subcommand("verify")->description("closed-form identity and norm checks");
  app.get_subcommand("modes")->description("argument-principle scan for eigenvalues");
  app.get_subcommand("resolvent")->description("resolvent residual checks");
  app.get_subcommand("evolve")->description("time evolution in similarity coordinates");
  app.get_subcommand("tune")->description("bisection of the blowup time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  const auto scenario = wmlab::scenario_from_string(app.get_subcommands().front()->get_name());
  try {
    wmlab::RunConfig cfg = config_path.empty() ? wmlab::parse_config(nlohmann::json::object(), scenario)
                                               : wmlab::load_config(config_path, scenario);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    wmlab::validate(cfg);
    const int code = wmlab::run(cfg);
    std::printf("%s: %s (report in %s)\n", wmlab::to_string(cfg.scenario).c_str(), code == 0 ? "PASS" : "FAIL",
                cfg.out.c_str());
    return code;
  } catch (const wmlab::ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
