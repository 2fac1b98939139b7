#include "viscoflow/tensor3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "viscoflow/errors.hpp"

namespace viscoflow {

Tensor3& Tensor3::operator+=(const Tensor3& o) {
  for (std::size_t i = 0; i < 9; ++i) a_[i] += o.a_[i];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& o) {
  for (std::size_t i = 0; i < 9; ++i) a_[i] -= o.a_[i];
  return *this;
}

Tensor3& Tensor3::operator*=(double s) {
  for (auto& v : a_) v *= s;
  return *this;
}

Tensor3 Tensor3::transpose() const {
  Tensor3 t;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
  return t;
}

double Tensor3::det() const {
  const auto& m = a_;
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
Tensor3 operator-(Tensor3 a) { return a *= -1.0; }
Tensor3 operator*(Tensor3 a, double s) { return a *= s; }
Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

Tensor3 operator*(const Tensor3& a, const Tensor3& b) {
  Tensor3 c;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

SymTensor3 SymTensor3::spd(const std::array<double, 6>& components) {
  SymTensor3 s(components);
  const auto eig = sym_eigen(s);
  if (!(eig.values[0] > 0.0))
    throw NotPositiveDefinite("tensor is not positive definite (smallest eigenvalue " +
                              std::to_string(eig.values[0]) + ")");
  return s;
}

Tensor3 SymTensor3::full() const {
  const auto& c = c_;
  return Tensor3({c[0], c[3], c[4], c[3], c[1], c[5], c[4], c[5], c[2]});
}

SymTensor3& SymTensor3::operator+=(const SymTensor3& o) {
  for (std::size_t i = 0; i < 6; ++i) c_[i] += o.c_[i];
  return *this;
}

SymTensor3& SymTensor3::operator-=(const SymTensor3& o) {
  for (std::size_t i = 0; i < 6; ++i) c_[i] -= o.c_[i];
  return *this;
}

SymTensor3& SymTensor3::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

SymTensor3 operator+(SymTensor3 a, const SymTensor3& b) { return a += b; }
SymTensor3 operator-(SymTensor3 a, const SymTensor3& b) { return a -= b; }
SymTensor3 operator*(SymTensor3 a, double s) { return a *= s; }
SymTensor3 operator*(double s, SymTensor3 a) { return a *= s; }

// Cyclic Jacobi rotations. Converges quadratically; for 3x3 a handful of
// sweeps reach machine precision.
SymEigen sym_eigen(const SymTensor3& s) {
  Tensor3 a = s.full();
  Tensor3 v = Tensor3::identity();
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double diag = a(0, 0) * a(0, 0) + a(1, 1) * a(1, 1) + a(2, 2) * a(2, 2);
    if (off == 0.0 || off <= 1e-36 * diag) break;
    for (std::size_t p = 0; p < 2; ++p)
      for (std::size_t q = p + 1; q < 3; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < 3; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < 3; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < 3; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
  }

  std::array<std::size_t, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymEigen out{};
  for (std::size_t n = 0; n < 3; ++n) {
    out.values[n] = a(order[n], order[n]);
    for (std::size_t k = 0; k < 3; ++k) out.vectors(k, n) = v(k, order[n]);
  }
  return out;
}

double contract(const Tensor3& a, const Tensor3& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 9; ++i) s += a.data()[i] * b.data()[i];
  return s;
}

double frobenius_norm(const Tensor3& a) { return std::sqrt(contract(a, a)); }

double frobenius_norm(const SymTensor3& a) {
  const auto& c = a.components();
  return std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + 2.0 * (c[3] * c[3] + c[4] * c[4] + c[5] * c[5]));
}

double spectral_norm(const Tensor3& a) {
  const auto ata = sym(a.transpose() * a);
  return std::sqrt(std::max(0.0, sym_eigen(ata).values[2]));
}

Tensor3 deviator(const Tensor3& a) {
  Tensor3 d = a;
  const double m = a.trace() / 3.0;
  for (std::size_t i = 0; i < 3; ++i) d(i, i) -= m;
  return d;
}

SymTensor3 deviator(const SymTensor3& a) {
  auto c = a.components();
  const double m = a.trace() / 3.0;
  for (std::size_t i = 0; i < 3; ++i) c[i] -= m;
  return SymTensor3(c);
}

namespace {

double unimodular_factor(double det) {
  if (!(det > 0.0))
    throw NonPositiveDeterminant("unimodular part requires det > 0 (got " + std::to_string(det) + ")");
  return std::cbrt(1.0 / det);
}

}  // namespace

Tensor3 unimodular(const Tensor3& a) { return a * unimodular_factor(a.det()); }

SymTensor3 unimodular(const SymTensor3& a) { return a * unimodular_factor(a.det()); }

SymTensor3 sym(const Tensor3& a) {
  return SymTensor3({a(0, 0), a(1, 1), a(2, 2), 0.5 * (a(0, 1) + a(1, 0)), 0.5 * (a(0, 2) + a(2, 0)),
                     0.5 * (a(1, 2) + a(2, 1))});
}

double skew_norm(const Tensor3& a) { return 0.5 * frobenius_norm(a - a.transpose()); }

SymTensor3 sym_sqrt(const SymTensor3& a) {
  const auto eig = sym_eigen(a);
  if (!(eig.values[0] > 0.0))
    throw NotPositiveDefinite("square root requires a positive definite tensor (smallest eigenvalue " +
                              std::to_string(eig.values[0]) + ")");
  const auto& q = eig.vectors;
  std::array<double, 3> r{};
  for (std::size_t n = 0; n < 3; ++n) r[n] = std::sqrt(eig.values[n]);
  SymTensor3 out;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t n = 0; n < 3; ++n) s += q(i, n) * r[n] * q(j, n);
      out.set(i, j, s);
    }
  return out;
}

Tensor3 tensor_exp(const Tensor3& a) {
  const double norm = frobenius_norm(a);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Tensor3 scaled = a * std::ldexp(1.0, -squarings);

  Tensor3 sum = Tensor3::identity();
  Tensor3 term = Tensor3::identity();
  for (int k = 1; k < 64; ++k) {
    term = term * scaled * (1.0 / k);
    sum += term;
    if (frobenius_norm(term) < 1e-16 * frobenius_norm(sum)) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

Tensor3 invert(const Tensor3& a) {
  const double det = a.det();
  const double scale = frobenius_norm(a);
  if (!(std::abs(det) > 1e-14 * scale * scale * scale))
    throw SingularTensor("tensor is singular (det " + std::to_string(det) + ")");
  Tensor3 inv;
  inv(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  inv(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  inv(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  inv(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  inv(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  inv(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  inv(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  inv(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  inv(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return inv * (1.0 / det);
}

SymTensor3 invert(const SymTensor3& a) { return sym(invert(a.full())); }

SymTensor3 congruence(const Tensor3& a, const SymTensor3& s) { return sym(a.transpose() * s.full() * a); }

}  // namespace viscoflow
