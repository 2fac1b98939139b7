#pragma once

#include <vector>

#include "viscoflow/tensor3.hpp"

namespace viscoflow {

/// Strain-driven deformation history: F(t) is the unimodular part of a
/// piecewise-linear interpolation between knots. Outside the knot range the
/// end values are held.
class LoadingProgram {
 public:
  struct Knot {
    double t;
    Tensor3 F;
  };

  /// Requires at least one knot, strictly increasing times and a positive
  /// determinant of the interpolant (checked on 1000 samples).
  explicit LoadingProgram(std::vector<Knot> knots);

  Tensor3 deformation_gradient(double t) const;
  /// C(t) = F(t)ᵀ F(t)
  SymTensor3 right_cauchy_green(double t) const;

  const std::vector<Knot>& knots() const { return knots_; }
  double start_time() const { return knots_.front().t; }
  double end_time() const { return knots_.back().t; }

 private:
  Tensor3 interpolate(double t) const;

  std::vector<Knot> knots_;
};

/// Non-proportional, non-monotonic program on [0, 300] s through
/// F1 = 1, F2 = diag(2, 1/√2, 1/√2), F3 = simple shear, F4 = diag(1/√2, 2, 1/√2).
LoadingProgram paper_loading();

/// The same program with F held at its t = hold_from value afterwards
/// (pure relaxation from that instant on).
LoadingProgram paper_loading_relaxation(double hold_from);

}  // namespace viscoflow
