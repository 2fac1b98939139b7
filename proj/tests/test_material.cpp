#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "viscoflow/errors.hpp"
#include "viscoflow/material.hpp"

using namespace viscoflow;

namespace {

const MaterialParams kDefaults = MaterialParams::defaults();

// Overstressed state with C = 1: Ci = diag(l, 1/l, 1) with l chosen so that
// μ‖(Ci⁻¹)^D‖ exceeds the yield threshold.
SymTensor3 flowing_ci(double l = 1.02) { return SymTensor3::diag(l, 1.0 / l, 1.0); }

}  // namespace

TEST_CASE("parameter validation names the violated constraint") {
  CHECK_NOTHROW(kDefaults.validate());
  CHECK(kDefaults.k == 73500.0);
  CHECK(kDefaults.mu == 28200.0);
  CHECK(kDefaults.K == 270.0);
  CHECK(kDefaults.m == 3.6);
  CHECK(kDefaults.eta == 2e6);
  auto p = kDefaults;
  p.m = 0.5;
  try {
    p.validate();
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("m >= 1") != std::string::npos);
  }
  p = kDefaults;
  p.eta = -1;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = kDefaults;
  p.eta = 0;
  CHECK_NOTHROW(p.validate());
  for (double MaterialParams::*field :
       {&MaterialParams::k, &MaterialParams::mu, &MaterialParams::K, &MaterialParams::k0, &MaterialParams::rho_R}) {
    p = kDefaults;
    p.*field = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
  }
}

TEST_CASE("free energy examples") {
  CHECK(free_energy(Tensor3::identity(), kDefaults) == 0.0);
  MaterialParams p = kDefaults;
  p.mu = 2.0;
  CHECK(free_energy(Tensor3::diag(4, 0.5, 0.5), p) == doctest::Approx(2.0).epsilon(1e-14));
  for (double c : {0.5, 1.3, 2.0}) {
    const double lnJ = 0.5 * std::log(c * c * c);
    CHECK(free_energy(c * Tensor3::identity(), kDefaults) ==
          doctest::Approx(0.5 * kDefaults.k * lnJ * lnJ).epsilon(1e-12));
  }
  CHECK_THROWS_AS(free_energy(Tensor3::diag(1, 1, -1), kDefaults), NonPositiveDeterminant);
  oracle::Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const auto a = rng.spd(0.5).full();
    CHECK(free_energy(a, kDefaults) >= 0.0);
    CHECK(free_energy(a, kDefaults) == doctest::Approx(oracle::energy(oracle::to_eigen(a), kDefaults)).epsilon(1e-12));
  }
}

TEST_CASE("free energy of a product commutes") {
  oracle::Rng rng(32);
  for (int i = 0; i < 100; ++i) {
    auto a = Tensor3::identity() + rng.tensor(0.4);
    auto b = Tensor3::identity() + rng.tensor(0.4);
    if (a.det() <= 0.1) a = -1.0 * a;
    if (b.det() <= 0.1) b = -1.0 * b;
    if (a.det() <= 0.1 || b.det() <= 0.1) continue;
    CHECK(std::abs(free_energy(a * b, kDefaults) - free_energy(b * a, kDefaults)) <= 1e-10);
  }
}

TEST_CASE("stress examples") {
  CHECK(frobenius_norm(pk2_stress(SymTensor3::identity(), SymTensor3::identity(), kDefaults)) == 0.0);
  for (double c : {0.9, 1.1, 1.5}) {
    const auto t = pk2_stress(c * c * SymTensor3::identity(), SymTensor3::identity(), kDefaults);
    const double expected = kDefaults.k * std::log(c * c * c) / (c * c);
    CHECK(oracle::max_abs_diff(t.full(), expected * Tensor3::identity()) <= 1e-10 * std::abs(expected));
  }
}

TEST_CASE("stress matches finite differences of the energy") {
  oracle::Rng rng(33);
  for (int i = 0; i < 100; ++i) {
    const auto C = rng.spd(0.3);
    const auto Ci = rng.unimodular_spd(0.3);
    const auto t = pk2_stress(C, Ci, kDefaults);
    const auto fd = oracle::stress_by_differences(C, Ci, kDefaults);
    CHECK(frobenius_norm(t - fd) <= 1e-6 * frobenius_norm(t));
  }
}

TEST_CASE("flow quantities") {
  const auto q0 = flow_quantities(SymTensor3::identity(), SymTensor3::identity(), kDefaults);
  CHECK(q0.F_norm == 0.0);
  CHECK(q0.f == doctest::Approx(-kSqrtTwoThirds * kDefaults.K).epsilon(1e-15));
  CHECK(q0.lambda_i == 0.0);

  // small elastic strain stays below the yield threshold
  const auto qe = flow_quantities(SymTensor3::diag(1.001, 1 / std::sqrt(1.001), 1 / std::sqrt(1.001)),
                                  SymTensor3::identity(), kDefaults);
  CHECK(qe.f < 0.0);
  CHECK(qe.lambda_i == 0.0);

  oracle::Rng rng(34);
  for (int i = 0; i < 50; ++i) {
    const auto Ci = rng.unimodular_spd(0.05);
    const auto q = flow_quantities(SymTensor3::identity(), Ci, kDefaults);
    CHECK(q.F_norm == doctest::Approx(kDefaults.mu * oracle::inverse_deviator_norm(Ci)).epsilon(1e-10));
    CHECK(q.F_norm >= 0.0);
    CHECK(q.lambda_i >= 0.0);
    if (q.f <= 0) CHECK(q.lambda_i == 0.0);
    if (q.f > 0) CHECK(q.lambda_i == doctest::Approx(std::pow(q.f / kDefaults.k0, kDefaults.m) / kDefaults.eta));
  }
}

TEST_CASE("Perzyna rate") {
  CHECK(perzyna_rate(-1.0, kDefaults) == 0.0);
  CHECK(perzyna_rate(0.0, kDefaults) == 0.0);
  CHECK(perzyna_rate(10.0, kDefaults) == doctest::Approx(std::pow(10.0, 3.6) / 2e6));
  CHECK(macaulay(-3.0) == 0.0);
  CHECK(macaulay(2.5) == 2.5);
}

TEST_CASE("evolution right-hand side") {
  CHECK(frobenius_norm(evolution_rhs(SymTensor3::identity(), SymTensor3::identity(), kDefaults)) == 0.0);

  // reduced case C = 1: rhs = 2 mu alpha(x) (Ci⁻¹)^D Ci with alpha(x) = <(mu x − sqrt(2/3)K)/k0>^m / (eta mu x)
  for (double l : {1.02, 1.05, 0.97}) {
    const auto Ci = flowing_ci(l);
    const double x = oracle::inverse_deviator_norm(Ci);
    const double alpha =
        std::pow(macaulay((kDefaults.mu * x - kSqrtTwoThirds * kDefaults.K) / kDefaults.k0), kDefaults.m) /
        (kDefaults.eta * kDefaults.mu * x);
    REQUIRE(alpha > 0.0);
    const Tensor3 expected = 2.0 * kDefaults.mu * alpha * (deviator(invert(Ci.full())) * Ci.full());
    const auto rhs = evolution_rhs(SymTensor3::identity(), Ci, kDefaults);
    CHECK(oracle::max_abs_diff(rhs.full(), expected) <= 1e-12 * frobenius_norm(expected));
  }

  oracle::Rng rng(35);
  int flowing = 0;
  for (int i = 0; i < 200; ++i) {
    const auto C = rng.unimodular_spd(0.2);
    const auto Ci = rng.unimodular_spd(0.2);
    const auto rhs = evolution_rhs(C, Ci, kDefaults);
    if (frobenius_norm(rhs) == 0.0) continue;
    ++flowing;
    // Jacobi: d(det Ci)/dt / det Ci = Ci⁻¹ : rhs
    CHECK(std::abs(contract(invert(Ci.full()), rhs.full())) <= 1e-12 * (1 + frobenius_norm(rhs)));
    // the general-arithmetic product is symmetric before sym() is applied
    const auto fq = flow_quantities(C, Ci, kDefaults);
    const Tensor3 raw = (2.0 * fq.lambda_i / fq.F_norm) * (deviator(C.full() * fq.T_tilde.full()) * Ci.full());
    CHECK(skew_norm(raw) <= 1e-13 * (1 + frobenius_norm(raw)));
  }
  CHECK(flowing > 100);
}

TEST_CASE("dissipation") {
  oracle::Rng rng(36);
  // relaxation: Ċ = 0 at a flowing state
  for (int i = 0; i < 50; ++i) {
    const auto C = rng.unimodular_spd(0.2);
    const auto Ci = rng.unimodular_spd(0.2);
    const auto ci_dot = evolution_rhs(C, Ci, kDefaults);
    const double d = dissipation(C, SymTensor3{}, Ci, ci_dot, kDefaults);
    CHECK(d >= -1e-10);
    // equals −d/dt ψ(C Ci⁻¹) along the flow, checked by a central difference in time
    const double h = 1e-6 / (1.0 + frobenius_norm(ci_dot));
    const double psi_p = free_energy(C.full() * invert((Ci + h * ci_dot).full()), kDefaults);
    const double psi_m = free_energy(C.full() * invert((Ci - h * ci_dot).full()), kDefaults);
    CHECK(d == doctest::Approx(-(psi_p - psi_m) / (2 * h)).epsilon(1e-5).scale(1e-8));
  }
  // elastic processes conserve energy
  for (int i = 0; i < 50; ++i) {
    const auto C = rng.spd(0.3);
    const auto Ci = rng.unimodular_spd(0.3);
    const auto C_dot = rng.symmetric(1.0);
    CHECK(std::abs(dissipation(C, C_dot, Ci, SymTensor3{}, kDefaults)) <= 1e-10 * (1 + frobenius_norm(pk2_stress(C, Ci, kDefaults))));
  }
  // flowing states with arbitrary loading rates
  for (int i = 0; i < 50; ++i) {
    const auto C = rng.spd(0.2);
    const auto Ci = rng.unimodular_spd(0.2);
    const auto ci_dot = evolution_rhs(C, Ci, kDefaults);
    CHECK(dissipation(C, rng.symmetric(1.0), Ci, ci_dot, kDefaults) >= -1e-10);
  }
}

TEST_CASE("reference change") {
  oracle::Rng rng(37);
  const auto C = rng.spd(0.3);
  const auto Ci = rng.unimodular_spd(0.3);
  const auto [c1, ci1] = change_reference(C, Ci, Tensor3::identity());
  CHECK(c1 == C);
  CHECK(ci1 == Ci);
  CHECK_THROWS_AS(change_reference(C, Ci, 2.0 * Tensor3::identity()), NotUnimodular);

  for (int i = 0; i < 100; ++i) {
    const auto C2 = rng.spd(0.3);
    const auto Ci2 = rng.unimodular_spd(0.3);
    const double psi = free_energy(C2.full() * invert(Ci2.full()), kDefaults);
    const auto [cr, cir] = change_reference(C2, Ci2, rng.rotation());
    CHECK(std::abs(free_energy(cr.full() * invert(cir.full()), kDefaults) - psi) <= 1e-10);
  }

  // pulling back with C^{1/2} of a unimodular C gives the identity
  const auto Cu = rng.unimodular_spd(0.4);
  const auto [c_new, ci_new] = change_reference(Cu, Ci, sym_sqrt(Cu).full());
  CHECK(oracle::max_abs_diff(c_new.full(), Tensor3::identity()) <= 1e-12);
  CHECK(std::abs(ci_new.det() - 1.0) <= 1e-12);
}

TEST_CASE("second-order expansion of the energy at the identity") {
  // |ψ(1+Δ) − (k/8)(trΔ)² − (μ/4)tr((Δ^D)²)| / ‖Δ‖³ stays bounded as ‖Δ‖ → 0
  oracle::Rng rng(38);
  for (int trial = 0; trial < 5; ++trial) {
    const auto dir = rng.symmetric(1.0);
    const auto unit = (1.0 / frobenius_norm(dir)) * dir;
    double first = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const auto delta = eps * unit;
      const auto dev = deviator(delta.full());
      const double quad = kDefaults.k / 8.0 * delta.trace() * delta.trace() + kDefaults.mu / 4.0 * (dev * dev).trace();
      const double ratio =
          std::abs(free_energy(Tensor3::identity() + delta.full(), kDefaults) - quad) / std::pow(eps, 3);
      if (first == 0.0) first = ratio;
      CHECK(ratio <= 2.0 * first + 1e-3 * kDefaults.k);
    }
  }
}

TEST_CASE("tangent space of the unimodular manifold") {
  // |B⁻¹ : (A − B)| / ε² bounded for A, B in M with ‖A − B‖ = ε
  oracle::Rng rng(39);
  for (int trial = 0; trial < 5; ++trial) {
    const auto B = rng.unimodular_spd(0.5);
    const auto dir = rng.symmetric(1.0);
    double first = 0.0;
    for (double step : {1e-1, 1e-2, 1e-3}) {
      const auto A = unimodular(B + step * dir);
      const double eps = frobenius_norm(A - B);
      const double ratio = std::abs(contract(invert(B.full()), (A - B).full())) / (eps * eps);
      if (first == 0.0) first = ratio;
      CHECK(ratio <= 2.0 * first + 10.0);
    }
  }
}
