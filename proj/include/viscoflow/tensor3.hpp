#pragma once

#include <array>
#include <cstddef>

namespace viscoflow {

/// General second-rank tensor in three dimensions, row-major 3x3 storage.
class Tensor3 {
 public:
  constexpr Tensor3() = default;
  constexpr explicit Tensor3(const std::array<double, 9>& rowMajor) : a_(rowMajor) {}

  static constexpr Tensor3 identity() { return diag(1.0, 1.0, 1.0); }
  static constexpr Tensor3 diag(double a, double b, double c) {
    return Tensor3({a, 0.0, 0.0, 0.0, b, 0.0, 0.0, 0.0, c});
  }

  constexpr double operator()(std::size_t i, std::size_t j) const { return a_[3 * i + j]; }
  constexpr double& operator()(std::size_t i, std::size_t j) { return a_[3 * i + j]; }

  constexpr const std::array<double, 9>& data() const { return a_; }

  Tensor3& operator+=(const Tensor3& o);
  Tensor3& operator-=(const Tensor3& o);
  Tensor3& operator*=(double s);

  Tensor3 transpose() const;
  double trace() const { return a_[0] + a_[4] + a_[8]; }
  double det() const;

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::array<double, 9> a_{};
};

Tensor3 operator+(Tensor3 a, const Tensor3& b);
Tensor3 operator-(Tensor3 a, const Tensor3& b);
Tensor3 operator-(Tensor3 a);
Tensor3 operator*(Tensor3 a, double s);
Tensor3 operator*(double s, Tensor3 a);
/// Composition A·B.
Tensor3 operator*(const Tensor3& a, const Tensor3& b);

/// Symmetric second-rank tensor.
///
/// Only six components are stored, ordered (11, 22, 33, 12, 13, 23). Use the
/// accessors or `components()`; the ordering is part of the CSV formats.
class SymTensor3 {
 public:
  constexpr SymTensor3() = default;
  constexpr explicit SymTensor3(const std::array<double, 6>& components) : c_(components) {}

  static constexpr SymTensor3 identity() { return diag(1.0, 1.0, 1.0); }
  static constexpr SymTensor3 diag(double a, double b, double c) {
    return SymTensor3({a, b, c, 0.0, 0.0, 0.0});
  }
  /// Builds from components and checks that every eigenvalue is positive.
  static SymTensor3 spd(const std::array<double, 6>& components);

  double operator()(std::size_t i, std::size_t j) const { return c_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, double v) { c_[index(i, j)] = v; }

  constexpr const std::array<double, 6>& components() const { return c_; }

  Tensor3 full() const;
  operator Tensor3() const { return full(); }  // NOLINT(google-explicit-constructor)

  SymTensor3& operator+=(const SymTensor3& o);
  SymTensor3& operator-=(const SymTensor3& o);
  SymTensor3& operator*=(double s);

  double trace() const { return c_[0] + c_[1] + c_[2]; }
  double det() const { return full().det(); }

  friend bool operator==(const SymTensor3&, const SymTensor3&) = default;

 private:
  static constexpr std::size_t index(std::size_t i, std::size_t j) {
    if (i == j) return i;
    const std::size_t lo = i < j ? i : j;
    const std::size_t hi = i < j ? j : i;
    return lo == 0 ? (hi == 1 ? 3 : 4) : 5;
  }

  std::array<double, 6> c_{};
};

SymTensor3 operator+(SymTensor3 a, const SymTensor3& b);
SymTensor3 operator-(SymTensor3 a, const SymTensor3& b);
SymTensor3 operator*(SymTensor3 a, double s);
SymTensor3 operator*(double s, SymTensor3 a);

/// Eigen-decomposition of a symmetric tensor: A = Q diag(values) Qᵀ,
/// eigenvectors are the columns of Q, values ascending.
struct SymEigen {
  std::array<double, 3> values;
  Tensor3 vectors;
};

SymEigen sym_eigen(const SymTensor3& a);

/// A : B = tr(A·Bᵀ)
double contract(const Tensor3& a, const Tensor3& b);

double frobenius_norm(const Tensor3& a);
double frobenius_norm(const SymTensor3& a);

/// Largest singular value.
double spectral_norm(const Tensor3& a);

Tensor3 deviator(const Tensor3& a);
SymTensor3 deviator(const SymTensor3& a);

/// det(A)^(-1/3)·A; throws NonPositiveDeterminant when det(A) <= 0.
Tensor3 unimodular(const Tensor3& a);
SymTensor3 unimodular(const SymTensor3& a);

/// (A + Aᵀ)/2
SymTensor3 sym(const Tensor3& a);

/// Skew residual ‖A − sym(A)‖.
double skew_norm(const Tensor3& a);

/// Principal square root of an SPD tensor; throws NotPositiveDefinite.
SymTensor3 sym_sqrt(const SymTensor3& a);

/// Matrix exponential (scaling and squaring with a truncated Taylor series).
Tensor3 tensor_exp(const Tensor3& a);

/// Throws SingularTensor when |det A| <= 1e-14·‖A‖³.
Tensor3 invert(const Tensor3& a);
SymTensor3 invert(const SymTensor3& a);

/// Symmetric product Aᵀ·S·A for symmetric S.
SymTensor3 congruence(const Tensor3& a, const SymTensor3& s);

}  // namespace viscoflow
