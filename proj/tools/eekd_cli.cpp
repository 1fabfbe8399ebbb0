// Command-line entry point: eekd run --config <path> [--seed-override N] [--quiet]

#include "eekd/harness.hpp"

#include <CLI11.hpp>

#include <cstdlib>

int main(int argc, char** argv) {
  CLI::App app{"Experience-ensemble knowledge distillation experiments"};
  app.require_subcommand(1);

  eekd::RunOptions options;
  std::string config;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("--config", config, "Experiment config (JSON)")->required();
  auto* seed_opt = run->add_option("--seed-override", seed, "Run a single seed instead of config.seeds");
  run->add_flag("--quiet", options.quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  options.config = config;
  if (seed_opt->count() > 0) options.seed_override = seed;
  if (const char* out = std::getenv("EEKD_OUT"); out && *out) options.output_override = out;
  return eekd::run(options);
}
