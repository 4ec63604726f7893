#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dmtsim/commands.hpp"

int main(int argc, char** argv) {
  using dmtsim::cli::Command;

  CLI::App app{"Monte Carlo outage and diversity-multiplexing-interference tradeoff simulator"};
  app.set_version_flag("--version", std::string(DMTSIM_VERSION));
  app.require_subcommand(1);

  dmtsim::cli::RunSpec spec;
  std::string config_path;
  std::string output_dir = ".";
  std::uint64_t seed = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Configuration file")->required();
    sub->add_option("--out", output_dir, "Output directory");
    sub->add_option("--set", spec.overrides, "Override a config key (section.key=value)")
        ->take_all()
        ->expected(1);
    sub->add_option("--workers", spec.workers, "OpenMP worker threads (default: all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "Override rng.seed");
  };
  auto* sweep = app.add_subcommand("sweep", "Outage probability sweep over the SNR grid");
  auto* surface = app.add_subcommand("dmt-surface", "Tabulate the theoretical tradeoff surface");
  auto* verify = app.add_subcommand("verify", "Run the receiver and tradeoff property suite");
  for (auto* sub : {sweep, surface, verify}) {
    add_common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dmtsim::cli::kExitConfigError;
  }

  if (sweep->parsed()) {
    spec.command = Command::kSweep;
  } else if (surface->parsed()) {
    spec.command = Command::kDmtSurface;
  } else {
    spec.command = Command::kVerify;
  }
  spec.config_path = config_path;
  spec.output_dir = output_dir;
  for (auto* sub : {sweep, surface, verify}) {
    if (sub->parsed() && sub->count("--seed") > 0) {
      spec.seed = seed;
    }
  }
  return dmtsim::cli::run(spec, std::cout, std::cerr);
}
