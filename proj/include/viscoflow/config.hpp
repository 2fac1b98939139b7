#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "viscoflow/loading.hpp"
#include "viscoflow/material.hpp"
#include "viscoflow/stability.hpp"
#include "viscoflow/trajectory.hpp"

namespace viscoflow {

struct SimulateSettings {
  IntegratorKind method = IntegratorKind::MEBM;
  double dt = 1.0;
};

struct StabilitySettings {
  double theta_max = 0.03;
  int theta_points = 30;  ///< curve samples on (0, theta_max]
  int resolution = 400;
  int refinement = 10;
};

struct Demo1DSettings {
  Rheo1DParams params;
  double eps_i0_first = 0.0;
  double eps_i0_second = 0.001;
  double t_end = 2.5;
  double dt = 1e-3;
  std::optional<FitWindow> window;  ///< default: skip the first 20%
};

/// Everything a CLI run needs. Loaded from JSON; unknown keys are errors.
struct RunConfig {
  MaterialParams material;
  /// Empty: the built-in program on [0, 300] s.
  std::vector<LoadingProgram::Knot> knots;
  std::vector<IntegratorKind> methods{IntegratorKind::EBM, IntegratorKind::MEBM, IntegratorKind::EM};
  std::vector<double> dts{1.0, 0.5};
  std::optional<double> dt_ref;
  double t_end = 300.0;
  std::string output_dir = "out";
  bool cache_reference = true;
  SimulateSettings simulate;
  StabilitySettings stability;
  Demo1DSettings demo_1d;

  LoadingProgram loading() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// The embedded configuration: Table-1 material, built-in loading, dt_ref 0.01.
RunConfig default_config();
nlohmann::json default_config_json();

/// Missing keys keep the RunConfig defaults (dt_ref stays unset). Throws ConfigError.
RunConfig parse_config(const nlohmann::json& j);
/// Throws IoError when unreadable, ConfigError when invalid.
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& config);

}  // namespace viscoflow
