#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "viscoflow/errors.hpp"
#include "viscoflow/material.hpp"

namespace viscoflow {

/// Energy distance sqrt(rho_R psi_el(Ci1 Ci2⁻¹)) between two states on the
/// unimodular manifold. Not symmetric in its arguments.
double dist(const SymTensor3& Ci1, const SymTensor3& Ci2, const MaterialParams& params);

// ---------------------------------------------------------------------------
// One-dimensional viscoplastic device (spring in series with a Perzyna
// dashpot/friction element).

struct Rheo1DParams {
  double E = 1000.0;          ///< elastic modulus, MPa
  double K = 1.0;             ///< yield stress, MPa
  double eta = 100.0;         ///< viscosity, MPa·s
  double strain_rate = 0.01;  ///< 1/s
  /// Optional harmonic modulation eps(t) = rate·t + amplitude·sin(2π t / period).
  double strain_amplitude = 0.0;
  double strain_period = 0.0;

  void validate() const;
  double total_strain(double t) const;
};

struct Rheo1DSample {
  double t;
  double eps_i;
};

/// Euler-backward integration of the scalar flow rule on [0, t_end]; each
/// step is solved in closed form.
std::vector<Rheo1DSample> simulate_1d(const Rheo1DParams& params, double eps_i0, double t_end, double dt);

// ---------------------------------------------------------------------------
// Decay-rate estimation.

struct FitWindow {
  double t_lo;
  double t_hi;
};

struct DecayFit {
  double gamma;      ///< −slope of ln(dist) vs t
  double intercept;  ///< ln(dist) at t = 0
  std::size_t points;
};

/// Least-squares line through (t, ln d) over the window. Throws EmptyWindow
/// when fewer than two samples fall in the window and NonPositiveDistance on
/// any d <= 0 there.
DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> distances, FitWindow window);

/// Window that skips the first 20% of [t_first, t_last].
FitWindow default_fit_window(double t_first, double t_last);

/// Fits the decay of dist_fn between two trajectories sampled at the same
/// times. `time_of` and `state_of` project a sample onto (t, state).
template <class Sample, class TimeOf, class DistFn>
DecayFit estimate_decay_rate(std::span<const Sample> traj1, std::span<const Sample> traj2, TimeOf time_of,
                             DistFn dist_fn, std::optional<FitWindow> window = std::nullopt) {
  if (traj1.size() != traj2.size())
    throw InvalidArgument("trajectories must share their time stamps");
  if (traj1.empty()) throw EmptyWindow("empty trajectories");
  std::vector<double> t(traj1.size());
  std::vector<double> d(traj1.size());
  for (std::size_t i = 0; i < traj1.size(); ++i) {
    t[i] = time_of(traj1[i]);
    if (std::abs(t[i] - time_of(traj2[i])) > 1e-9 * std::max(1.0, std::abs(t[i])))
      throw InvalidArgument("trajectories must share their time stamps");
    d[i] = dist_fn(traj1[i], traj2[i]);
  }
  return fit_decay_rate(t, d, window.value_or(default_fit_window(t.front(), t.back())));
}

// ---------------------------------------------------------------------------
// Stability domain.

/// Largest eigenvalue of the restricted 2x2 operator built from the flow
/// direction at Ci1. Throws ZeroDeviator when (Ci1⁻¹)^D vanishes.
double q_hat(const SymTensor3& Ci1);

struct QThetaSettings {
  int resolution = 400;
  double margin = 2.0;  ///< grid covers ln λ ∈ [−margin·θ, margin·θ]
  int refinement = 10;  ///< refinement factor around the best coarse cell
  unsigned threads = 0;  ///< 0: use default_thread_count()
};

/// Maximum of q_hat over unimodular diagonal Ci with ‖(Ci⁻¹)^D‖ <= θ.
double q_theta(double theta, const QThetaSettings& settings = {});

struct StabilityDomain {
  double theta;   ///< 2 sqrt(2/3) K / mu
  double q_theta;
  double x_cr;
  double f_cr;
  double x_cr_estimate;  ///< sqrt(2/3) K/mu + m q
  double f_cr_estimate;  ///< m mu q
};

/// Critical ‖(Ci⁻¹)^D‖ and overstress above which the decay estimate holds.
StabilityDomain critical_values(const MaterialParams& params, double q);

/// 2 sqrt(2/3) K / mu
double stability_theta(const MaterialParams& params);

}  // namespace viscoflow
