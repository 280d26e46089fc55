#include <CLI11.hpp>

#include <iostream>

#include "qbrown/acceptance.hpp"
#include "qbrown/config.hpp"
#include "qbrown/scenario.hpp"

namespace {

int load(const std::string& path, qbrown::ScenarioConfig& cfg) {
  try {
    cfg = qbrown::load_config(path);
    return 0;
  } catch (const qbrown::ConfigError& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qbrown: dispersion dynamics and equilibrium densities of quantum Brownian motion"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  int jobs = 1;
  bool quick = false;

  auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--jobs", jobs, "Worker threads for independent cells")->check(CLI::PositiveNumber);

  auto* accept = app.add_subcommand("accept", "Run the acceptance suite");
  accept->add_flag("--quick", quick, "Only criteria budgeted at 10 s or less");
  accept->add_option("--jobs", jobs, "Criteria run concurrently")->check(CLI::PositiveNumber);

  auto* scales = app.add_subcommand("scales", "Print the derived scales of a config's parameters");
  scales->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*accept) {
    const auto results = qbrown::run_acceptance(quick, jobs);
    for (const auto& r : results) std::cout << qbrown::format_verdict(r) << '\n';
    return qbrown::all_passed(results) ? 0 : 1;
  }

  qbrown::ScenarioConfig cfg;
  if (const int rc = load(config_path, cfg); rc != 0) return rc;

  if (*scales) {
    std::cout << qbrown::describe_scales(cfg.params);
    return 0;
  }

  const auto outcome = qbrown::run_scenario(cfg, {out_dir, jobs});
  for (const auto& f : outcome.files) std::cout << "wrote " << out_dir << '/' << f << '\n';
  if (outcome.exit_code != 0) std::cerr << "qbrown: " << outcome.cause << '\n';
  return outcome.exit_code;
}
