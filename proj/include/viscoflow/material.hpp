#pragma once

#include <utility>

#include "viscoflow/tensor3.hpp"

namespace viscoflow {

/// Material constants of the viscoplastic model. Stresses in MPa, time in s.
/// Energies are always handled as rho_R·psi_el, so rho_R only rescales the
/// dissipation.
struct MaterialParams {
  double k = 73500.0;     ///< bulk modulus
  double mu = 28200.0;    ///< shear modulus
  double K = 270.0;       ///< yield stress
  double m = 3.6;         ///< Perzyna exponent
  double eta = 2.0e6;     ///< viscosity parameter
  double k0 = 1.0;        ///< stress normalizer of the Perzyna bracket
  double rho_R = 1.0;     ///< reference mass density

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;

  /// Aluminium-alloy values used for the accuracy study.
  static MaterialParams defaults() { return {}; }

  friend bool operator==(const MaterialParams&, const MaterialParams&) = default;
};

struct FlowQuantities {
  SymTensor3 T_tilde;   ///< 2nd Piola-Kirchhoff stress
  double F_norm = 0.0;  ///< norm of the driving force
  double f = 0.0;       ///< overstress
  double lambda_i = 0.0;
};

/// sqrt(2/3)
inline constexpr double kSqrtTwoThirds = 0.816496580927726032732428024901963797;

/// Macaulay bracket max(x, 0).
inline double macaulay(double x) { return x > 0.0 ? x : 0.0; }

/// rho_R·psi_el(A) = k/2 (ln sqrt(det A))² + mu/2 (tr unimodular(A) − 3).
double free_energy(const Tensor3& a, const MaterialParams& params);

/// rho_R ∂psi_el/∂A for a general (non-symmetric) argument.
Tensor3 free_energy_gradient(const Tensor3& a, const MaterialParams& params);

/// T = k ln sqrt(det C) C⁻¹ + mu C⁻¹ (unimodular(C) Ci⁻¹)^D.
SymTensor3 pk2_stress(const SymTensor3& C, const SymTensor3& Ci, const MaterialParams& params);

FlowQuantities flow_quantities(const SymTensor3& C, const SymTensor3& Ci, const MaterialParams& params);

/// Perzyna multiplier for a given overstress.
double perzyna_rate(double overstress, const MaterialParams& params);

/// Right-hand side of the evolution equation for Ci.
SymTensor3 evolution_rhs(const SymTensor3& C, const SymTensor3& Ci, const MaterialParams& params);

/// Dissipation per unit mass for the given state and rates.
double dissipation(const SymTensor3& C, const SymTensor3& C_dot, const SymTensor3& Ci,
                   const SymTensor3& Ci_dot, const MaterialParams& params);

/// Pulls (C, Ci) back to the isochoric reference configuration F0:
/// returns (F0⁻ᵀ C F0⁻¹, F0⁻ᵀ Ci F0⁻¹). Throws NotUnimodular unless det F0 = 1.
std::pair<SymTensor3, SymTensor3> change_reference(const SymTensor3& C, const SymTensor3& Ci,
                                                   const Tensor3& F0);

}  // namespace viscoflow
