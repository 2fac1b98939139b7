#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "viscoflow/errors.hpp"
#include "viscoflow/integrators.hpp"
#include "viscoflow/stability.hpp"

using namespace viscoflow;

namespace {

const MaterialParams kDefaults = MaterialParams::defaults();

MaterialParams aluminium() {
  MaterialParams p;
  p.K = 300.0;
  p.mu = 25000.0;
  return p;
}

// Larger eigenvalue of the 2x2 restricted operator, through Eigen's general eigensolver.
double restricted_operator_eigen(const SymTensor3& Ci) {
  using oracle::Mat3;
  const Mat3 ci = oracle::to_eigen(Ci.full());
  const Mat3 s = oracle::spd_sqrt(ci);
  const Mat3 s_inv = s.inverse();
  Mat3 dev = ci.inverse();
  dev -= (dev.trace() / 3.0) * Mat3::Identity();
  auto project = [&](const Mat3& b) -> Mat3 { return b - (b.cwiseProduct(s).sum() / s.squaredNorm()) * s; };
  const Mat3 b1 = project(-2.0 * s_inv * dev / dev.norm());
  const Mat3 b2 = project(s_inv);
  const double a = b1.cwiseProduct(b2).sum();
  Eigen::Matrix2d m;
  m << a, b2.squaredNorm(), b1.squaredNorm(), a;
  m *= 0.5;
  return Eigen::EigenSolver<Eigen::Matrix2d>(m).eigenvalues().real().maxCoeff();
}

}  // namespace

TEST_CASE("energy distance") {
  oracle::Rng rng(51);
  const auto a = rng.unimodular_spd(0.3);
  CHECK(dist(a, a, kDefaults) <= 1e-6);
  CHECK(dist(SymTensor3::identity(), SymTensor3::identity(), kDefaults) == 0.0);
  CHECK_THROWS_AS(dist(SymTensor3::diag(2, 1, 1), a, kDefaults), NotUnimodular);
  CHECK_THROWS_AS(dist(a, SymTensor3::diag(2, 1, 1), kDefaults), NotUnimodular);

  for (int i = 0; i < 100; ++i) {
    const auto c1 = rng.unimodular_spd(0.3);
    const auto c2 = rng.unimodular_spd(0.3);
    const double d = dist(c1, c2, kDefaults);
    CHECK(d > 0.0);
    const auto f0 = rng.unimodular_tensor();
    const auto [unused1, n1] = change_reference(SymTensor3::identity(), c1, f0);
    const auto [unused2, n2] = change_reference(SymTensor3::identity(), c2, f0);
    CHECK(std::abs(dist(n1, n2, kDefaults) - d) <= 1e-10 * (1 + d));
  }

  // not symmetric in general
  bool asymmetric = false;
  for (int i = 0; i < 20 && !asymmetric; ++i) {
    const auto c1 = rng.unimodular_spd(0.5);
    const auto c2 = rng.unimodular_spd(0.5);
    asymmetric = std::abs(dist(c1, c2, kDefaults) - dist(c2, c1, kDefaults)) > 1e-6;
  }
  CHECK(asymmetric);
}

TEST_CASE("energy distance is equivalent to the norm near a state") {
  oracle::Rng rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const auto base = rng.unimodular_spd(0.3);
    const auto dir = rng.symmetric(1.0);
    std::vector<double> ratios;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const auto other = unimodular(base + eps * dir);
      ratios.push_back(dist(other, base, kDefaults) / frobenius_norm(other - base));
    }
    for (double r : ratios) CHECK(r > 0.0);
    CHECK(ratios[1] == doctest::Approx(ratios[0]).epsilon(0.05));
    CHECK(ratios[2] == doctest::Approx(ratios[1]).epsilon(0.05));
  }
}

TEST_CASE("1-D device") {
  Rheo1DParams p;
  CHECK_NOTHROW(p.validate());
  auto bad = p;
  bad.eta = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = p;
  bad.strain_amplitude = 0.1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(simulate_1d(p, 0.0, 1.0, 0.0), InvalidArgument);

  // below yield nothing moves
  Rheo1DParams slow = p;
  slow.strain_rate = 1e-4;
  for (const auto& s : simulate_1d(slow, 0.0, 5.0, 0.01)) CHECK(s.eps_i == 0.0);

  // steady flow: eps_i grows with the loading rate
  const auto traj = simulate_1d(p, 0.0, 10.0, 0.01);
  REQUIRE(traj.size() == 1001);
  const double slope = (traj[1000].eps_i - traj[900].eps_i) / (traj[1000].t - traj[900].t);
  CHECK(slope == doctest::Approx(p.strain_rate).epsilon(1e-6));
  // the trailing stress equals K + eta·rate in steady state
  CHECK(p.E * (p.total_strain(10.0) - traj.back().eps_i) == doctest::Approx(p.K + p.eta * p.strain_rate));

  Rheo1DParams wavy = p;
  wavy.strain_amplitude = 0.002;
  wavy.strain_period = 5.0;
  CHECK(wavy.total_strain(1.25) == doctest::Approx(0.0125 + 0.002));
}

TEST_CASE("1-D decay rate matches E/eta") {
  Rheo1DParams p;
  const auto a = simulate_1d(p, 0.0, 2.5, 1e-3);
  const auto b = simulate_1d(p, 0.001, 2.5, 1e-3);
  const auto fit = estimate_decay_rate<Rheo1DSample>(
      a, b, [](const Rheo1DSample& s) { return s.t; },
      [](const Rheo1DSample& x, const Rheo1DSample& y) { return std::abs(x.eps_i - y.eps_i); });
  CHECK(fit.gamma == doctest::Approx(p.E / p.eta).epsilon(0.05));
  CHECK(fit.points == 2001);
  // the backward-Euler rate ln(1 + E dt/eta)/dt
  CHECK(fit.gamma == doctest::Approx(std::log(1 + p.E * 1e-3 / p.eta) / 1e-3).epsilon(1e-6));
}

TEST_CASE("decay fit") {
  std::vector<double> t, d;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.1 * i);
    d.push_back(3.0 * std::exp(-0.7 * t.back()));
  }
  const auto fit = fit_decay_rate(t, d, {0.0, 10.0});
  CHECK(fit.gamma == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.points == 101);
  CHECK_THROWS_AS(fit_decay_rate(t, d, {20.0, 30.0}), EmptyWindow);
  CHECK_THROWS_AS(fit_decay_rate(t, d, {5.0, 5.0}), EmptyWindow);
  auto zero = d;
  zero[50] = 0.0;
  CHECK_THROWS_AS(fit_decay_rate(t, zero, {0.0, 10.0}), NonPositiveDistance);
  CHECK_NOTHROW(fit_decay_rate(t, zero, {6.0, 10.0}));

  const auto w = default_fit_window(0.0, 10.0);
  CHECK(w.t_lo == doctest::Approx(2.0));
  CHECK(w.t_hi == 10.0);

  // identical trajectories have nothing to fit
  const auto a = simulate_1d(Rheo1DParams{}, 0.0, 1.0, 0.01);
  auto same = [](const Rheo1DSample& x, const Rheo1DSample& y) { return std::abs(x.eps_i - y.eps_i); };
  auto time = [](const Rheo1DSample& s) { return s.t; };
  CHECK_THROWS_AS(estimate_decay_rate<Rheo1DSample>(a, a, time, same), NonPositiveDistance);
  const auto shorter = simulate_1d(Rheo1DParams{}, 0.0, 0.5, 0.01);
  CHECK_THROWS_AS(estimate_decay_rate<Rheo1DSample>(a, shorter, time, same), InvalidArgument);
}

TEST_CASE("3-D trajectories approach each other under sustained flow") {
  const auto load = paper_loading();
  const auto ci2 = unimodular(SymTensor3({1.001, 0.9995, 1.0, 0.0004, -0.0003, 0.0002}));
  const auto a = integrate(load, kDefaults, IntegratorKind::MEBM, 0.01, 4.0);
  const auto b = integrate(load, kDefaults, IntegratorKind::MEBM, 0.01, 4.0, ci2);
  const auto fit = estimate_decay_rate<TrajectorySample>(
      a.samples, b.samples, [](const TrajectorySample& s) { return s.t; },
      [](const TrajectorySample& x, const TrajectorySample& y) { return dist(x.Ci, y.Ci, kDefaults); },
      FitWindow{0.5, 3.5});
  CHECK(fit.gamma > 0.0);
  for (const auto& s : a.samples)
    if (s.t >= 0.5) CHECK(s.overstress > 0.0);
}

TEST_CASE("restricted operator eigenvalue") {
  CHECK_THROWS_AS(q_hat(SymTensor3::identity()), ZeroDeviator);
  CHECK_THROWS_AS(q_hat(SymTensor3::diag(2, 1, 1)), NotUnimodular);

  for (double l : {1.01, 1.001, 1.0001, 1.00001}) {
    const auto ci = SymTensor3::diag(l, 1 / l, 1);
    CHECK(std::abs(q_hat(ci) - oracle::restricted_operator_sweep(ci)) <= 1e-10);
  }

  oracle::Rng rng(53);
  int tested = 0;
  while (tested < 100) {
    const auto ci = rng.unimodular_spd(0.03);
    if (oracle::inverse_deviator_norm(ci) > 0.03) continue;
    ++tested;
    const double q = q_hat(ci);
    CHECK(std::abs(q - oracle::restricted_operator_sweep(ci)) <= 1e-8);
    CHECK(q == doctest::Approx(restricted_operator_eigen(ci)).epsilon(1e-9).scale(1e-6));
  }

  // permuting the principal values does not change the result
  for (int i = 0; i < 20; ++i) {
    const double l1 = std::exp(rng.uniform(-0.02, 0.02));
    const double l2 = std::exp(rng.uniform(-0.02, 0.02));
    const double l3 = 1 / (l1 * l2);
    const double q = q_hat(SymTensor3::diag(l1, l2, l3));
    CHECK(q_hat(SymTensor3::diag(l2, l1, l3)) == doctest::Approx(q).epsilon(1e-9));
    CHECK(q_hat(SymTensor3::diag(l3, l2, l1)) == doctest::Approx(q).epsilon(1e-9));
    CHECK(q_hat(SymTensor3::diag(l1, l3, l2)) == doctest::Approx(q).epsilon(1e-9));
    // and neither does a rotation of the principal axes
    const auto Q = rng.rotation();
    CHECK(q_hat(congruence(Q.transpose(), SymTensor3::diag(l1, l2, l3))) == doctest::Approx(q).epsilon(1e-6));
  }
}

TEST_CASE("q(theta)") {
  const double q014 = q_theta(0.014);
  CHECK(q014 >= 2.3e-7 / 2);
  CHECK(q014 <= 2.3e-7 * 2);
  CHECK_THROWS_AS(q_theta(0.0), InvalidArgument);
  CHECK_THROWS_AS(q_theta(-1.0), InvalidArgument);
  QThetaSettings corners;
  corners.resolution = 2;
  corners.margin = 100.0;
  CHECK_THROWS_AS(q_theta(0.01, corners), InfeasibleTheta);

  QThetaSettings coarse;
  coarse.resolution = 100;
  double prev = 0.0;
  for (int i = 1; i <= 15; ++i) {
    const double q = q_theta(0.002 * i, coarse);
    CHECK(q >= 0.0);
    CHECK(q >= prev * (1 - 1e-3));
    prev = q;
  }
  CHECK(q_theta(1e-4, coarse) < 1e-12);

  // thread count does not change the result
  QThetaSettings one = coarse, many = coarse;
  one.threads = 1;
  many.threads = 4;
  CHECK(q_theta(0.02, one) == q_theta(0.02, many));
}

TEST_CASE("critical values") {
  const auto zero = critical_values(kDefaults, 0.0);
  CHECK(zero.x_cr == doctest::Approx(kSqrtTwoThirds * kDefaults.K / kDefaults.mu).epsilon(1e-15));
  CHECK(std::abs(zero.f_cr) <= 1e-12);
  CHECK_THROWS_AS(critical_values(kDefaults, -1.0), InvalidArgument);

  const auto al = aluminium();
  CHECK(stability_theta(al) == doctest::Approx(2 * kSqrtTwoThirds * 300.0 / 25000.0));
  const auto d = critical_values(al, 2.3e-7);
  CHECK(d.x_cr > kSqrtTwoThirds * al.K / al.mu);
  CHECK(d.f_cr > 0.0);
  CHECK(std::round(d.f_cr / al.m * 1e4) / 1e4 == doctest::Approx(0.0057));
  CHECK(d.f_cr_estimate == doctest::Approx(al.m * al.mu * 2.3e-7));

  // exact minus estimate is second order in q
  for (const auto& p : {kDefaults, al}) {
    std::vector<double> scaled;
    for (double q : {1e-5, 1e-6, 1e-7}) {
      const auto c = critical_values(p, q);
      scaled.push_back(std::abs(c.x_cr - c.x_cr_estimate) / (q * q));
    }
    CHECK(scaled[1] == doctest::Approx(scaled[0]).epsilon(0.05));
    CHECK(scaled[2] == doctest::Approx(scaled[1]).epsilon(0.05));
  }
}
