// Command-line front end: simulate | error-study | stability | demo-1d.
#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "viscoflow/commands.hpp"
#include "viscoflow/config.hpp"
#include "viscoflow/errors.hpp"

int main(int argc, char** argv) {
  using namespace viscoflow;

  CLI::App app{"Finite-strain viscoplasticity integrators and stability toolkit"};
  std::string config_path;
  std::string out_dir;
  bool print_config = false;
  app.add_option("--config", config_path, "JSON configuration file (default: embedded)");
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_flag("--print-config", print_config, "print the resolved configuration and exit");
  app.require_subcommand(0, 1);
  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory and write trajectory.csv");
  auto* error_study = app.add_subcommand("error-study", "error curves against a fine reference solution");
  auto* stability = app.add_subcommand("stability", "q(theta) curve and critical overstress values");
  auto* demo = app.add_subcommand("demo-1d", "decay rate of the one-dimensional device");
  for (auto* sub : {simulate, error_study, stability, demo}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  RunConfig config;
  try {
    config = config_path.empty() ? default_config() : load_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return exit_code_for(e);
  }

  if (print_config) {
    std::cout << to_json(config).dump(2) << "\n";
    return kExitOk;
  }
  if (*simulate) return cmd_simulate(config, std::cout, std::cerr);
  if (*error_study) return cmd_error_study(config, std::cout, std::cerr);
  if (*stability) return cmd_stability(config, std::cout, std::cerr);
  if (*demo) return cmd_demo_1d(config, std::cout, std::cerr);
  std::cerr << app.help();
  return kExitConfig;
}
