#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace pann {

using Vec3 = std::array<double, 3>;

/// Dense 3x3 real tensor, row-major. Index (i, J) follows the first-index /
/// second-index convention of two-point tensors such as F.
struct Tensor3 {
  std::array<double, 9> a{};

  constexpr double& operator()(std::size_t i, std::size_t j) noexcept { return a[3 * i + j]; }
  constexpr double operator()(std::size_t i, std::size_t j) const noexcept { return a[3 * i + j]; }

  static constexpr Tensor3 zero() noexcept { return {}; }
  static constexpr Tensor3 identity() noexcept {
    Tensor3 t;
    t(0, 0) = t(1, 1) = t(2, 2) = 1.0;
    return t;
  }
  static constexpr Tensor3 diag(double x, double y, double z) noexcept {
    Tensor3 t;
    t(0, 0) = x;
    t(1, 1) = y;
    t(2, 2) = z;
    return t;
  }

  constexpr Tensor3& operator+=(const Tensor3& o) noexcept {
    for (std::size_t k = 0; k < 9; ++k) a[k] += o.a[k];
    return *this;
  }
  constexpr Tensor3& operator-=(const Tensor3& o) noexcept {
    for (std::size_t k = 0; k < 9; ++k) a[k] -= o.a[k];
    return *this;
  }
  constexpr Tensor3& operator*=(double s) noexcept {
    for (auto& v : a) v *= s;
    return *this;
  }

  friend constexpr Tensor3 operator+(Tensor3 l, const Tensor3& r) noexcept { return l += r; }
  friend constexpr Tensor3 operator-(Tensor3 l, const Tensor3& r) noexcept { return l -= r; }
  friend constexpr Tensor3 operator*(Tensor3 l, double s) noexcept { return l *= s; }
  friend constexpr Tensor3 operator*(double s, Tensor3 r) noexcept { return r *= s; }
  friend constexpr bool operator==(const Tensor3&, const Tensor3&) = default;
};

constexpr Tensor3 operator*(const Tensor3& x, const Tensor3& y) noexcept {
  Tensor3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += x(i, k) * y(k, j);
      r(i, j) = s;
    }
  return r;
}

constexpr Vec3 operator*(const Tensor3& x, const Vec3& v) noexcept {
  Vec3 r{};
  for (std::size_t i = 0; i < 3; ++i) r[i] = x(i, 0) * v[0] + x(i, 1) * v[1] + x(i, 2) * v[2];
  return r;
}

constexpr Tensor3 transpose(const Tensor3& x) noexcept {
  Tensor3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = x(j, i);
  return r;
}

constexpr double trace(const Tensor3& x) noexcept { return x(0, 0) + x(1, 1) + x(2, 2); }

constexpr double det(const Tensor3& x) noexcept {
  return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
         x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
         x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
}

/// Double contraction A:B = A_ij B_ij.
constexpr double ddot(const Tensor3& x, const Tensor3& y) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < 9; ++k) s += x.a[k] * y.a[k];
  return s;
}

inline double norm(const Tensor3& x) noexcept { return std::sqrt(ddot(x, x)); }

constexpr Tensor3 outer(const Vec3& u, const Vec3& v) noexcept {
  Tensor3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = u[i] * v[j];
  return r;
}

constexpr double dot(const Vec3& u, const Vec3& v) noexcept {
  return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

inline double norm(const Vec3& v) noexcept { return std::sqrt(dot(v, v)); }

constexpr Vec3 cross(const Vec3& u, const Vec3& v) noexcept {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

/// Dense 3x3x3x3 real tensor; entry (i, J, k, L) is the second derivative
/// d^2 W / dF_iJ dF_kL when used as a tangent.
struct Tensor4 {
  std::array<double, 81> a{};

  static constexpr std::size_t index(std::size_t i, std::size_t j, std::size_t k, std::size_t l) noexcept {
    return 27 * i + 9 * j + 3 * k + l;
  }
  constexpr double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) noexcept {
    return a[index(i, j, k, l)];
  }
  constexpr double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const noexcept {
    return a[index(i, j, k, l)];
  }

  constexpr Tensor4& operator+=(const Tensor4& o) noexcept {
    for (std::size_t n = 0; n < 81; ++n) a[n] += o.a[n];
    return *this;
  }
  constexpr Tensor4& operator*=(double s) noexcept {
    for (auto& v : a) v *= s;
    return *this;
  }
  friend constexpr Tensor4 operator+(Tensor4 l, const Tensor4& r) noexcept { return l += r; }
  friend constexpr Tensor4 operator*(double s, Tensor4 r) noexcept { return r *= s; }
};

/// (x ⊗ y)_iJkL = x_iJ y_kL
constexpr Tensor4 dyad(const Tensor3& x, const Tensor3& y) noexcept {
  Tensor4 r;
  for (std::size_t p = 0; p < 9; ++p)
    for (std::size_t q = 0; q < 9; ++q) r.a[9 * p + q] = x.a[p] * y.a[q];
  return r;
}

/// X : A : Y
constexpr double contract(const Tensor3& x, const Tensor4& t, const Tensor3& y) noexcept {
  double s = 0.0;
  for (std::size_t p = 0; p < 9; ++p) {
    double row = 0.0;
    for (std::size_t q = 0; q < 9; ++q) row += t.a[9 * p + q] * y.a[q];
    s += x.a[p] * row;
  }
  return s;
}

inline double norm(const Tensor4& t) noexcept {
  double s = 0.0;
  for (double v : t.a) s += v * v;
  return std::sqrt(s);
}

/// Largest |A_iJkL - A_kLiJ| relative to the largest entry magnitude.
inline double major_symmetry_defect(const Tensor4& t) noexcept {
  double worst = 0.0, scale = 0.0;
  for (std::size_t p = 0; p < 9; ++p)
    for (std::size_t q = 0; q < 9; ++q) {
      worst = std::fmax(worst, std::fabs(t.a[9 * p + q] - t.a[9 * q + p]));
      scale = std::fmax(scale, std::fabs(t.a[9 * p + q]));
    }
  return scale > 0.0 ? worst / scale : 0.0;
}

}  // namespace pann
