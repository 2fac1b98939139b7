#include "viscoflow/material.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "viscoflow/errors.hpp"

namespace viscoflow {

void MaterialParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("material parameter constraint violated: ") + what);
  };
  require(std::isfinite(k) && k > 0.0, "k > 0");
  require(std::isfinite(mu) && mu > 0.0, "mu > 0");
  require(std::isfinite(K) && K > 0.0, "K > 0");
  require(std::isfinite(m) && m >= 1.0, "m >= 1");
  require(std::isfinite(eta) && eta >= 0.0, "eta >= 0");
  require(std::isfinite(k0) && k0 > 0.0, "k0 > 0");
  require(std::isfinite(rho_R) && rho_R > 0.0, "rho_R > 0");
}

double free_energy(const Tensor3& a, const MaterialParams& params) {
  const double det = a.det();
  if (!(det > 0.0)) throw NonPositiveDeterminant("free energy requires det(A) > 0");
  const double lnJ = 0.5 * std::log(det);
  return 0.5 * params.k * lnJ * lnJ + 0.5 * params.mu * (std::cbrt(1.0 / det) * a.trace() - 3.0);
}

Tensor3 free_energy_gradient(const Tensor3& a, const MaterialParams& params) {
  const double det = a.det();
  if (!(det > 0.0)) throw NonPositiveDeterminant("free energy requires det(A) > 0");
  const Tensor3 a_invT = invert(a).transpose();
  const double lnJ = 0.5 * std::log(det);
  return a_invT * (0.5 * params.k * lnJ) +
         0.5 * params.mu * (a_invT * deviator(unimodular(a).transpose()));
}

SymTensor3 pk2_stress(const SymTensor3& C, const SymTensor3& Ci, const MaterialParams& params) {
  const Tensor3 c_inv = invert(C.full());
  const double det = C.det();
  if (!(det > 0.0)) throw NonPositiveDeterminant("stress requires det(C) > 0");
  const Tensor3 t = c_inv * (params.k * 0.5 * std::log(det)) +
                    params.mu * (c_inv * deviator(unimodular(C.full()) * invert(Ci.full())));
  assert(skew_norm(t) <= 1e-10 * (1.0 + frobenius_norm(t)));
  return sym(t);
}

double perzyna_rate(double overstress, const MaterialParams& params) {
  const double x = macaulay(overstress / params.k0);
  if (x == 0.0) return 0.0;
  return std::pow(x, params.m) / params.eta;
}

namespace {

// (C·T)^D together with the stress, shared by flow quantities and the rhs.
struct DrivingForce {
  SymTensor3 stress;
  Tensor3 dev_CT;
  double norm;
};

DrivingForce driving_force(const SymTensor3& C, const SymTensor3& Ci, const MaterialParams& params) {
  DrivingForce d;
  d.stress = pk2_stress(C, Ci, params);
  d.dev_CT = deviator(C.full() * d.stress.full());
  // tr(M²) of a deviator with real spectrum is non-negative up to roundoff
  d.norm = std::sqrt(std::max(0.0, (d.dev_CT * d.dev_CT).trace()));
  return d;
}

}  // namespace

FlowQuantities flow_quantities(const SymTensor3& C, const SymTensor3& Ci, const MaterialParams& params) {
  const auto d = driving_force(C, Ci, params);
  FlowQuantities q;
  q.T_tilde = d.stress;
  q.F_norm = d.norm;
  q.f = d.norm - kSqrtTwoThirds * params.K;
  q.lambda_i = perzyna_rate(q.f, params);
  return q;
}

SymTensor3 evolution_rhs(const SymTensor3& C, const SymTensor3& Ci, const MaterialParams& params) {
  const auto d = driving_force(C, Ci, params);
  const double f = d.norm - kSqrtTwoThirds * params.K;
  const double lambda = perzyna_rate(f, params);
  // lambda = 0 whenever f <= 0, which also covers F = 0
  if (lambda == 0.0) return SymTensor3{};
  const Tensor3 rhs = (2.0 * lambda / d.norm) * (d.dev_CT * Ci.full());
  assert(skew_norm(rhs) <= 1e-10 * (1.0 + frobenius_norm(rhs)));
  return sym(rhs);
}

double dissipation(const SymTensor3& C, const SymTensor3& C_dot, const SymTensor3& Ci,
                   const SymTensor3& Ci_dot, const MaterialParams& params) {
  const Tensor3 ci_inv = invert(Ci.full());
  const Tensor3 g = free_energy_gradient(C.full() * ci_inv, params);
  // d/dt rho psi(C Ci⁻¹) = (G Ci⁻ᵀ) : Ċ − (Ci⁻ᵀ Cᵀ G Ci⁻ᵀ) : Ċi
  const Tensor3 d_dC = g * ci_inv.transpose();
  const Tensor3 d_dCi = -(ci_inv.transpose() * C.full().transpose() * g * ci_inv.transpose());
  const double energy_rate = contract(d_dC, C_dot) + contract(d_dCi, Ci_dot);
  const double stress_power = 0.5 * contract(pk2_stress(C, Ci, params), C_dot);
  return (stress_power - energy_rate) / params.rho_R;
}

std::pair<SymTensor3, SymTensor3> change_reference(const SymTensor3& C, const SymTensor3& Ci,
                                                   const Tensor3& F0) {
  const double det = F0.det();
  if (!(std::abs(det - 1.0) <= 1e-10))
    throw NotUnimodular("reference change requires det(F0) = 1 (got " + std::to_string(det) + ")");
  const Tensor3 f0_inv = invert(F0);
  return {congruence(f0_inv, C), congruence(f0_inv, Ci)};
}

}  // namespace viscoflow
