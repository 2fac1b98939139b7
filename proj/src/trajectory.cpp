#include "viscoflow/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "viscoflow/errors.hpp"

namespace viscoflow {

std::string_view to_string(IntegratorKind kind) {
  switch (kind) {
    case IntegratorKind::EBM: return "EBM";
    case IntegratorKind::MEBM: return "MEBM";
    case IntegratorKind::EM: return "EM";
  }
  return "?";
}

IntegratorKind parse_integrator_kind(std::string_view name) {
  if (name == "EBM") return IntegratorKind::EBM;
  if (name == "MEBM") return IntegratorKind::MEBM;
  if (name == "EM") return IntegratorKind::EM;
  throw InvalidArgument("unknown integrator '" + std::string(name) + "' (expected EBM, MEBM or EM)");
}

long Trajectory::index_of(double t) const {
  if (samples.empty() || dt <= 0.0) return -1;
  const double n = std::round((t - samples.front().t) / dt);
  if (n < 0 || n >= static_cast<double>(samples.size())) return -1;
  const auto idx = static_cast<long>(n);
  if (std::abs(samples[static_cast<std::size_t>(idx)].t - t) > 1e-9 * std::max(1.0, std::abs(t))) return -1;
  return idx;
}

double ErrorCurve::window_max(double lo, double hi) const {
  bool any = false;
  double best = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < lo || times[i] > hi) continue;
    best = any ? std::max(best, errors[i]) : errors[i];
    any = true;
  }
  if (!any) throw EmptyWindow("no error samples in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return best;
}

double ErrorCurve::at(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return errors[i];
  throw EmptyWindow("no error sample at t = " + std::to_string(t));
}

}  // namespace viscoflow
