#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "warpcap/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Numerics for rotationally symmetric manifolds: annulus capacities and "
      "bounds, p-parabolicity, optimal cutoffs, divergence-theorem harnesses, "
      "vector-inequality constants, and Sobolev counterexample checks."};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute a scenario file and write its report");
  std::string scenario_path;
  run->add_option("scenario", scenario_path, "scenario file to execute")->required();
  std::optional<double> tol;
  run->add_option("--tol", tol,
                  "quadrature tolerance override, absolute and relative (default 1e-12)");
  std::optional<std::string> out_dir;
  run->add_option("--out", out_dir,
                  "directory for relative output paths (default: $WARPCAP_OUT, then the "
                  "scenario file's directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits clean; bad usage is a validation error
  }

  warpcap::RunOverrides overrides;
  overrides.tol = tol;
  overrides.out_dir = out_dir;
  return warpcap::run_scenario_file(scenario_path, overrides, std::cerr);
}
