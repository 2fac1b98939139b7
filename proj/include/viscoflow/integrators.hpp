#pragma once

#include <optional>

#include "viscoflow/loading.hpp"
#include "viscoflow/material.hpp"
#include "viscoflow/trajectory.hpp"

namespace viscoflow {

/// One implicit step: find Ci at t_{n+1} given C at t_{n+1} and Ci at t_n.
struct StepProblem {
  SymTensor3 C_next;
  SymTensor3 Ci_prev;
  double dt = 0.0;
  MaterialParams params;
  IntegratorKind kind = IntegratorKind::MEBM;
  /// Warm start for xi, typically the previous step's converged value.
  std::optional<double> xi_guess;
};

struct StepSolution {
  SymTensor3 Ci_next;
  double xi = 0.0;  ///< dt · lambda_i at t_{n+1}
  int iterations = 0;
  double residual = 0.0;
};

struct StepResidual {
  SymTensor3 R_C;
  double R_xi = 0.0;

  /// ‖R_C‖ + |R_xi|
  double norm() const;
};

struct SolverSettings {
  int max_iterations = 50;
  int max_halvings = 10;
  double relative_tolerance = 1e-12;
};

/// B = 2 (xi / F) (C·T)^D. Throws DegenerateDrivingForce when xi > 0 and F < 1e-14.
Tensor3 operator_B(const SymTensor3& C_next, const SymTensor3& Ci, double xi, const MaterialParams& params);

/// The method's update map Φ(Ci, xi) applied to Ci_prev:
///   EBM  sym([1 − B]⁻¹ Ci_prev)
///   MEBM unimodular(sym([1 − B]⁻¹ Ci_prev))
///   EM   unimodular(sym(exp(B) Ci_prev))
SymTensor3 update_map(const StepProblem& problem, const SymTensor3& Ci_trial, double xi_trial);

/// R_C = Ci − Φ(Ci, xi), R_xi = xi − dt/eta ⟨f(C, Ci)/k0⟩^m.
StepResidual step_residual(const StepProblem& problem, const SymTensor3& Ci_trial, double xi_trial);

/// Newton solve of the 7-unknown step system with a finite-difference
/// Jacobian and a halving line search. Throws NoConvergence.
StepSolution solve_step(const StepProblem& problem, const SolverSettings& settings = {});

/// Drives solve_step over t_n = n·dt, n = 0..t_end/dt. NoConvergence carries
/// the failing step index.
Trajectory integrate(const LoadingProgram& loading, const MaterialParams& params, IntegratorKind kind,
                     double dt, double t_end, const SymTensor3& Ci0 = SymTensor3::identity());

}  // namespace viscoflow
