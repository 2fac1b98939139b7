#include "viscoflow/loading.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "viscoflow/errors.hpp"

namespace viscoflow {

LoadingProgram::LoadingProgram(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw InvalidArgument("loading program needs at least one knot");
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i].t > knots_[i - 1].t))
      throw InvalidArgument("loading knot times must be strictly increasing");
  constexpr int kSamples = 1000;
  for (int s = 0; s <= kSamples; ++s) {
    const double t = start_time() + (end_time() - start_time()) * s / kSamples;
    const double det = interpolate(t).det();
    if (!(det > 0.0))
      throw InvalidArgument("loading program has det(F') <= 0 at t = " + std::to_string(t));
  }
}

Tensor3 LoadingProgram::interpolate(double t) const {
  if (t <= knots_.front().t) return knots_.front().F;
  if (t >= knots_.back().t) return knots_.back().F;
  const auto upper = std::upper_bound(knots_.begin(), knots_.end(), t,
                                      [](double value, const Knot& k) { return value < k.t; });
  const auto lower = upper - 1;
  const double w = (t - lower->t) / (upper->t - lower->t);
  return (1.0 - w) * lower->F + w * upper->F;
}

Tensor3 LoadingProgram::deformation_gradient(double t) const { return unimodular(interpolate(t)); }

SymTensor3 LoadingProgram::right_cauchy_green(double t) const {
  const Tensor3 F = deformation_gradient(t);
  return sym(F.transpose() * F);
}

namespace {

std::vector<LoadingProgram::Knot> paper_knots() {
  const double r = 1.0 / std::sqrt(2.0);
  Tensor3 shear = Tensor3::identity();
  shear(0, 1) = 1.0;
  return {{0.0, Tensor3::identity()},
          {100.0, Tensor3::diag(2.0, r, r)},
          {200.0, shear},
          {300.0, Tensor3::diag(r, 2.0, r)}};
}

}  // namespace

LoadingProgram paper_loading() { return LoadingProgram(paper_knots()); }

LoadingProgram paper_loading_relaxation(double hold_from) {
  const LoadingProgram full = paper_loading();
  std::vector<LoadingProgram::Knot> knots;
  for (const auto& k : full.knots())
    if (k.t < hold_from) knots.push_back(k);
  const Tensor3 held = unimodular(full.deformation_gradient(hold_from));
  knots.push_back({hold_from, held});
  if (hold_from < full.end_time()) knots.push_back({full.end_time(), held});
  return LoadingProgram(std::move(knots));
}

}  // namespace viscoflow
