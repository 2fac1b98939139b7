#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "viscoflow/tensor3.hpp"

namespace viscoflow {

enum class IntegratorKind { EBM, MEBM, EM };

std::string_view to_string(IntegratorKind kind);
/// Accepts "EBM", "MEBM", "EM"; throws InvalidArgument otherwise.
IntegratorKind parse_integrator_kind(std::string_view name);

struct TrajectorySample {
  double t = 0.0;
  SymTensor3 Ci;
  double det_Ci = 1.0;
  double overstress = 0.0;  ///< f at (C(t), Ci(t)), MPa
  double xi = 0.0;
  int newton_iterations = 0;
};

/// Internal-state history on the uniform grid t_n = n·dt.
struct Trajectory {
  IntegratorKind method = IntegratorKind::MEBM;
  double dt = 0.0;
  std::vector<TrajectorySample> samples;

  /// Index of the sample at time t, or -1 when t is not on the grid.
  long index_of(double t) const;
};

/// ‖Ci_numer(t) − Ci_exact(t)‖ over shared sample times.
struct ErrorCurve {
  IntegratorKind method = IntegratorKind::MEBM;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> errors;

  /// Maximum error over samples with lo <= t <= hi; throws EmptyWindow.
  double window_max(double lo, double hi) const;
  /// Error at the sample closest to t (within 1e-9); throws EmptyWindow.
  double at(double t) const;
};

}  // namespace viscoflow
