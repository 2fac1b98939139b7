#include "viscoflow/integrators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "viscoflow/errors.hpp"

namespace viscoflow {

double StepResidual::norm() const { return frobenius_norm(R_C) + std::abs(R_xi); }

Tensor3 operator_B(const SymTensor3& C_next, const SymTensor3& Ci, double xi, const MaterialParams& params) {
  if (xi == 0.0) return Tensor3{};
  const auto T = pk2_stress(C_next, Ci, params);
  const Tensor3 dev_CT = deviator(C_next.full() * T.full());
  const double F = std::sqrt(std::max(0.0, (dev_CT * dev_CT).trace()));
  if (F < 1e-14) throw DegenerateDrivingForce("driving force vanishes while xi > 0");
  return (2.0 * xi / F) * dev_CT;
}

SymTensor3 update_map(const StepProblem& problem, const SymTensor3& Ci_trial, double xi_trial) {
  const Tensor3 B = operator_B(problem.C_next, Ci_trial, xi_trial, problem.params);
  const Tensor3 ci_prev = problem.Ci_prev.full();
  switch (problem.kind) {
    case IntegratorKind::EBM: return sym(invert(Tensor3::identity() - B) * ci_prev);
    case IntegratorKind::MEBM: return unimodular(sym(invert(Tensor3::identity() - B) * ci_prev));
    case IntegratorKind::EM: return unimodular(sym(tensor_exp(B) * ci_prev));
  }
  throw InvalidArgument("unknown integrator kind");
}

StepResidual step_residual(const StepProblem& problem, const SymTensor3& Ci_trial, double xi_trial) {
  StepResidual r;
  r.R_C = Ci_trial - update_map(problem, Ci_trial, xi_trial);
  const auto flow = flow_quantities(problem.C_next, Ci_trial, problem.params);
  r.R_xi = xi_trial - problem.dt * perzyna_rate(flow.f, problem.params);
  return r;
}

namespace {

using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;

Vec7 pack(const SymTensor3& ci, double xi) {
  Vec7 x;
  for (int i = 0; i < 6; ++i) x[i] = ci.components()[static_cast<std::size_t>(i)];
  x[6] = xi;
  return x;
}

SymTensor3 unpack_ci(const Vec7& x) {
  return SymTensor3({x[0], x[1], x[2], x[3], x[4], x[5]});
}

// Residual vector and norm at x; nullopt when the trial point is outside the
// model's domain (non-invertible tensors, non-positive determinants).
struct Evaluation {
  Vec7 r;
  double norm;
};

std::optional<Evaluation> evaluate(const StepProblem& problem, const Vec7& x) {
  try {
    const auto res = step_residual(problem, unpack_ci(x), x[6]);
    Evaluation e{pack(res.R_C, res.R_xi), res.norm()};
    if (!std::isfinite(e.norm)) return std::nullopt;
    return e;
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct NewtonOutcome {
  bool converged = false;
  Vec7 x;
  double norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

NewtonOutcome newton(const StepProblem& problem, Vec7 x, double tolerance, const SolverSettings& settings) {
  NewtonOutcome out;
  auto current = evaluate(problem, x);
  if (!current) return out;
  out.x = x;
  out.norm = current->norm;

  for (int it = 0; it < settings.max_iterations; ++it) {
    out.iterations = it;
    if (current->norm < tolerance) {
      out.converged = true;
      return out;
    }

    Mat7 J;
    for (int j = 0; j < 7; ++j) {
      const double h = 1e-7 * (1.0 + std::abs(x[j]));
      Vec7 xp = x;
      xp[j] += h;
      auto ep = evaluate(problem, xp);
      double step = h;
      if (!ep) {
        xp[j] = x[j] - h;
        ep = evaluate(problem, xp);
        step = -h;
      }
      if (!ep) return out;
      J.col(j) = (ep->r - current->r) / step;
    }

    const Vec7 dx = J.partialPivLu().solve(-current->r);
    if (!dx.allFinite()) return out;

    double alpha = 1.0;
    std::optional<Evaluation> accepted;
    Vec7 x_accepted = x;
    for (int halving = 0; halving <= settings.max_halvings; ++halving, alpha *= 0.5) {
      Vec7 trial = x + alpha * dx;
      trial[6] = std::max(0.0, trial[6]);
      auto e = evaluate(problem, trial);
      if (!e) continue;
      if (e->norm < current->norm || halving == settings.max_halvings) {
        accepted = e;
        x_accepted = trial;
        break;
      }
    }
    if (!accepted) return out;
    x = x_accepted;
    current = accepted;
    out.x = x;
    out.norm = current->norm;
  }
  out.iterations = settings.max_iterations;
  out.converged = current->norm < tolerance;
  return out;
}

}  // namespace

StepSolution solve_step(const StepProblem& problem, const SolverSettings& settings) {
  if (!(problem.dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (!(problem.params.eta > 0.0)) throw InvalidArgument("rate-dependent integration requires eta > 0");

  const auto trial_flow = flow_quantities(problem.C_next, problem.Ci_prev, problem.params);
  if (trial_flow.f <= 0.0) return StepSolution{problem.Ci_prev, 0.0, 0, 0.0};

  const double tolerance = settings.relative_tolerance * (1.0 + frobenius_norm(problem.Ci_prev));

  // Warm start first, then the explicit Perzyna predictor, then a cold start.
  std::vector<double> starts;
  if (problem.xi_guess && *problem.xi_guess > 0.0) starts.push_back(*problem.xi_guess);
  starts.push_back(problem.dt * perzyna_rate(trial_flow.f, problem.params));
  starts.push_back(0.0);

  NewtonOutcome last;
  int total_iterations = 0;
  for (const double xi0 : starts) {
    auto outcome = newton(problem, pack(problem.Ci_prev, xi0), tolerance, settings);
    total_iterations += outcome.iterations;
    if (!outcome.converged) {
      last = outcome;
      continue;
    }

    StepSolution sol;
    sol.xi = outcome.x[6];
    sol.iterations = total_iterations;
    sol.Ci_next = unpack_ci(outcome.x);
    sol.residual = outcome.norm;
    // Returning the image of the update map keeps MEBM/EM exactly on the
    // unimodular manifold; it is used whenever it is itself a converged point.
    try {
      const SymTensor3 mapped = update_map(problem, sol.Ci_next, sol.xi);
      const double mapped_norm = step_residual(problem, mapped, sol.xi).norm();
      if (mapped_norm < tolerance) {
        sol.Ci_next = mapped;
        sol.residual = mapped_norm;
      }
    } catch (const Error&) {
    }
    return sol;
  }
  throw NoConvergence(total_iterations, last.norm);
}

Trajectory integrate(const LoadingProgram& loading, const MaterialParams& params, IntegratorKind kind,
                     double dt, double t_end, const SymTensor3& Ci0) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (!(t_end > 0.0)) throw InvalidArgument("end time must be positive");
  const double steps_real = t_end / dt;
  const long steps = std::lround(steps_real);
  if (steps < 1 || std::abs(static_cast<double>(steps) * dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw InvalidArgument("end time must be a positive multiple of the time step");
  if (std::abs(Ci0.det() - 1.0) > 1e-10) throw NotUnimodular("initial Ci must have det = 1");
  SymTensor3::spd(Ci0.components());
  params.validate();

  Trajectory traj;
  traj.method = kind;
  traj.dt = dt;
  traj.samples.reserve(static_cast<std::size_t>(steps) + 1);

  const double t0 = loading.start_time();
  TrajectorySample first;
  first.t = t0;
  first.Ci = Ci0;
  first.det_Ci = Ci0.det();
  first.overstress = flow_quantities(loading.right_cauchy_green(t0), Ci0, params).f;
  traj.samples.push_back(first);

  StepProblem problem;
  problem.params = params;
  problem.kind = kind;
  problem.dt = dt;
  SymTensor3 ci = Ci0;
  double xi_prev = 0.0;
  for (long n = 1; n <= steps; ++n) {
    const double t = t0 + static_cast<double>(n) * dt;
    problem.C_next = loading.right_cauchy_green(t);
    problem.Ci_prev = ci;
    problem.xi_guess = xi_prev > 0.0 ? std::optional<double>(xi_prev) : std::nullopt;
    StepSolution sol;
    try {
      sol = solve_step(problem);
    } catch (const NoConvergence& e) {
      throw NoConvergence(e.iterations(), e.residual(), n);
    }
    ci = sol.Ci_next;
    xi_prev = sol.xi;

    TrajectorySample s;
    s.t = t;
    s.Ci = ci;
    s.det_Ci = ci.det();
    s.overstress = flow_quantities(problem.C_next, ci, params).f;
    s.xi = sol.xi;
    s.newton_iterations = sol.iterations;
    traj.samples.push_back(s);
  }
  return traj;
}

}  // namespace viscoflow
