#include "viscoflow/stability.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "viscoflow/errors.hpp"
#include "viscoflow/parallel.hpp"

namespace viscoflow {

namespace {

void require_unimodular(const SymTensor3& ci, double tol, const char* what) {
  const double det = ci.det();
  if (!(std::abs(det - 1.0) <= tol))
    throw NotUnimodular(std::string(what) + " must have det = 1 (got " + std::to_string(det) + ")");
}

}  // namespace

double dist(const SymTensor3& Ci1, const SymTensor3& Ci2, const MaterialParams& params) {
  require_unimodular(Ci1, 1e-8, "first state");
  require_unimodular(Ci2, 1e-8, "second state");
  const double energy = free_energy(Ci1.full() * invert(Ci2.full()), params);
  // the energy is non-negative; tiny negative values are roundoff
  return std::sqrt(std::max(0.0, energy));
}

void Rheo1DParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("1-D parameter constraint violated: ") + what);
  };
  require(std::isfinite(E) && E > 0.0, "E > 0");
  require(std::isfinite(K) && K > 0.0, "K > 0");
  require(std::isfinite(eta) && eta > 0.0, "eta > 0");
  require(std::isfinite(strain_rate), "strain_rate finite");
  require(std::isfinite(strain_amplitude), "strain_amplitude finite");
  require(strain_amplitude == 0.0 || (std::isfinite(strain_period) && strain_period > 0.0),
          "strain_period > 0 when strain_amplitude != 0");
}

double Rheo1DParams::total_strain(double t) const {
  double eps = strain_rate * t;
  if (strain_amplitude != 0.0) eps += strain_amplitude * std::sin(2.0 * std::numbers::pi * t / strain_period);
  return eps;
}

std::vector<Rheo1DSample> simulate_1d(const Rheo1DParams& params, double eps_i0, double t_end, double dt) {
  params.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("end time must be non-negative");
  const long steps = std::lround(t_end / dt);
  if (std::abs(static_cast<double>(steps) * dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw InvalidArgument("end time must be a multiple of the time step");

  std::vector<Rheo1DSample> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back({0.0, eps_i0});
  const double r = dt / params.eta;
  double eps_i = eps_i0;
  for (long n = 1; n <= steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    const double eps = params.total_strain(t);
    const double trial = eps - eps_i;
    if (params.E * std::abs(trial) > params.K) {
      // implicit step: |e - e_i| (1 + E dt/eta) = |trial| + K dt/eta, sign kept
      const double gap = (std::abs(trial) + params.K * r) / (1.0 + params.E * r);
      eps_i = eps - std::copysign(gap, trial);
    }
    out.push_back({t, eps_i});
  }
  return out;
}

DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> distances, FitWindow window) {
  if (times.size() != distances.size()) throw InvalidArgument("times and distances differ in length");
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t < window.t_lo || t > window.t_hi) continue;
    const double d = distances[i];
    if (!(d > 0.0))
      throw NonPositiveDistance("distance is not positive at t = " + std::to_string(t) +
                                " (identical or non-flowing trajectories?)");
    const double y = std::log(d);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++n;
  }
  if (n < 2) throw EmptyWindow("fewer than two samples in the fit window");
  const double nn = static_cast<double>(n);
  const double denom = nn * stt - st * st;
  if (!(denom > 0.0)) throw EmptyWindow("fit window has no time spread");
  const double slope = (nn * sty - st * sy) / denom;
  return DecayFit{-slope, (sy - slope * st) / nn, n};
}

FitWindow default_fit_window(double t_first, double t_last) {
  return FitWindow{t_first + 0.2 * (t_last - t_first), t_last};
}

double q_hat(const SymTensor3& Ci1) {
  require_unimodular(Ci1, 1e-10, "state");
  const SymTensor3 root = sym_sqrt(Ci1);
  const Tensor3 s = root.full();
  const Tensor3 s_inv = invert(s);
  const Tensor3 dev = deviator(invert(Ci1.full()));
  const double dev_norm = frobenius_norm(dev);
  if (!(dev_norm > 1e-14)) throw ZeroDeviator("flow direction undefined: (Ci^-1)^D = 0");

  const double ss = contract(s, s);
  auto project = [&](const Tensor3& b) { return b - (contract(b, s) / ss) * s; };
  const Tensor3 b1 = project((-2.0 / dev_norm) * (s_inv * dev));
  const Tensor3 b2 = project(s_inv);

  const double a = contract(b1, b2);
  const double b = contract(b1, b1);
  const double c = contract(b2, b2);
  // 2x2 operator [[a, c], [b, a]] / 2: trace a, determinant (a² − bc)/4
  const double half_trace = 0.5 * a;
  const double disc = half_trace * half_trace - 0.25 * (a * a - b * c);
  return half_trace + std::sqrt(std::max(0.0, disc));
}

namespace {

// ‖(Ci⁻¹)^D‖ for Ci = diag(l1, l2, 1/(l1 l2)).
double inverse_deviator_norm(double l1, double l2) {
  const std::array<double, 3> inv{1.0 / l1, 1.0 / l2, l1 * l2};
  const double mean = (inv[0] + inv[1] + inv[2]) / 3.0;
  double s = 0.0;
  for (double v : inv) s += (v - mean) * (v - mean);
  return std::sqrt(s);
}

struct GridBest {
  double value = -1.0;
  double u1 = 0.0;
  double u2 = 0.0;
};

// Maximum of q_hat over the feasible points of an n×n grid in (ln λ1, ln λ2).
GridBest sweep(double theta, double lo1, double lo2, double step, int n, unsigned threads) {
  std::vector<GridBest> rows(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    GridBest best;
    const double u1 = lo1 + static_cast<double>(i) * step;
    for (int j = 0; j < n; ++j) {
      const double u2 = lo2 + static_cast<double>(j) * step;
      const double l1 = std::exp(u1);
      const double l2 = std::exp(u2);
      const double x = inverse_deviator_norm(l1, l2);
      if (x > theta || x <= 1e-14) continue;
      const double q = q_hat(SymTensor3::diag(l1, l2, 1.0 / (l1 * l2)));
      if (q > best.value) best = {q, u1, u2};
    }
    rows[i] = best;
  });
  GridBest best;
  for (const auto& r : rows)
    if (r.value > best.value) best = r;
  return best;
}

}  // namespace

double q_theta(double theta, const QThetaSettings& settings) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw InvalidArgument("theta must be positive");
  if (settings.resolution < 2) throw InvalidArgument("q(theta) grid resolution must be >= 2");
  if (!(settings.margin > 0.0)) throw InvalidArgument("q(theta) grid margin must be positive");
  if (settings.refinement < 1) throw InvalidArgument("q(theta) refinement must be >= 1");

  const double half = settings.margin * theta;
  const double step = 2.0 * half / static_cast<double>(settings.resolution - 1);
  const GridBest coarse = sweep(theta, -half, -half, step, settings.resolution, settings.threads);
  if (coarse.value < 0.0)
    throw InfeasibleTheta("no grid point satisfies the constraint for theta = " + std::to_string(theta));
  if (settings.refinement == 1) return coarse.value;

  const double fine = step / static_cast<double>(settings.refinement);
  const GridBest refined = sweep(theta, coarse.u1 - step, coarse.u2 - step, fine, 2 * settings.refinement + 1,
                                 settings.threads);
  return std::max(coarse.value, refined.value);
}

StabilityDomain critical_values(const MaterialParams& params, double q) {
  params.validate();
  if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidArgument("q must be non-negative");
  const double a = kSqrtTwoThirds * params.K;
  const double mu = params.mu;
  const double b = a + (params.m - 1.0) * mu * q;
  StabilityDomain d;
  d.theta = stability_theta(params);
  d.q_theta = q;
  d.x_cr = (b + std::sqrt(b * b + 4.0 * mu * q * a)) / (2.0 * mu);
  d.f_cr = mu * d.x_cr - a;
  d.x_cr_estimate = a / mu + params.m * q;
  d.f_cr_estimate = params.m * mu * q;
  return d;
}

double stability_theta(const MaterialParams& params) { return 2.0 * kSqrtTwoThirds * params.K / params.mu; }

}  // namespace viscoflow
