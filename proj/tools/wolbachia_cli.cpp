#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "wolbachia/commands.hpp"

int main(int argc, char** argv) {
  namespace cli = wolbachia::cli;
  CLI::App app{"Free-boundary Wolbachia invasion: simulation, thresholds and spreading speeds"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  int parallelism = 1;

  auto add = [&](const char* name, const char* help, bool parallel = false) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON configuration file")->required();
    sub->add_option("--out", out, "output directory")->required();
    if (parallel) sub->add_option("--parallelism", parallelism, "concurrent runs")->check(CLI::PositiveNumber);
    return sub;
  };
  auto* simulate = add("simulate", "integrate the free-boundary system and classify the outcome");
  auto* sweep = add("sweep", "run a parameter sweep and tabulate outcomes", true);
  auto* eigen = add("eigen", "principal eigenvalue of the Neumann-Dirichlet problem");
  auto* speed = add("speed", "semi-wave speed and the spreading-speed bracket");
  auto* threshold = add("threshold", "critical d1, h0 or mu thresholds");
  auto* ode = add("ode", "well-mixed two-species or compartment model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  if (simulate->parsed()) return cli::cmd_simulate(config, out);
  if (sweep->parsed()) return cli::cmd_sweep(config, out, parallelism);
  if (eigen->parsed()) return cli::cmd_eigen(config, out);
  if (speed->parsed()) return cli::cmd_speed(config, out);
  if (threshold->parsed()) return cli::cmd_threshold(config, out);
  if (ode->parsed()) return cli::cmd_ode(config, out);
  return cli::kConfigError;
}
