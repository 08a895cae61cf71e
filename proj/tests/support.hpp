#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "pann/kinematics.hpp"
#include "pann/network.hpp"
#include "pann/tensor.hpp"

namespace pann::test {

inline constexpr Architecture kAllArchitectures[] = {Architecture::ConvexMonotonic, Architecture::Monotonic,
                                                     Architecture::Unrestricted1HL, Architecture::Unrestricted2HL};

/// I + spread * N(0, 1) entries, redrawn until det > 0.5.
inline Tensor3 random_invertible(std::mt19937_64& rng, double spread = 0.3) {
  std::normal_distribution<double> n(0.0, spread);
  for (;;) {
    Tensor3 f = Tensor3::identity();
    for (double& v : f.a) v += n(rng);
    if (det(f) > 0.5) return f;
  }
}

/// Random deformation gradient with det = 1.
inline Tensor3 random_unimodular(std::mt19937_64& rng, double spread = 0.3) {
  Tensor3 f = random_invertible(rng, spread);
  return f * (1.0 / std::cbrt(det(f)));
}

/// Uniform rotation from a normalized Gaussian quaternion.
inline Tensor3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  double w = n(rng), x = n(rng), y = n(rng), z = n(rng);
  const double s = std::sqrt(w * w + x * x + y * y + z * z);
  w /= s, x /= s, y /= s, z /= s;
  Tensor3 r;
  r(0, 0) = 1 - 2 * (y * y + z * z);
  r(0, 1) = 2 * (x * y - z * w);
  r(0, 2) = 2 * (x * z + y * w);
  r(1, 0) = 2 * (x * y + z * w);
  r(1, 1) = 1 - 2 * (x * x + z * z);
  r(1, 2) = 2 * (y * z - x * w);
  r(2, 0) = 2 * (x * z - y * w);
  r(2, 1) = 2 * (y * z + x * w);
  r(2, 2) = 1 - 2 * (x * x + y * y);
  return r;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v{n(rng), n(rng), n(rng)};
  const double s = norm(v);
  for (double& c : v) c /= s;
  return v;
}

inline std::vector<double> random_params(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> t(m);
  for (double& v : t) v = u(rng);
  return t;
}

/// Invariants of a random unimodular state plus parameters on [0, 1].
inline InvariantState random_state(std::mt19937_64& rng, std::size_t m, double spread = 0.4) {
  const auto inv = isochoric_invariants(random_unimodular(rng, spread));
  return {inv.i1_bar, inv.i2_bar, random_params(rng, m)};
}

inline PotentialModel random_model(Architecture arch, std::size_t n, std::size_t m, std::mt19937_64& rng) {
  PotentialModel model(arch, n, m);
  initialize_glorot(model, rng);
  // Spread the biases so that activations leave their linear range.
  std::normal_distribution<double> b(0.0, 0.5);
  for (std::size_t l = 0; l < model.layers().size(); ++l)
    for (double& v : model.bias(l)) v = b(rng);
  return model;
}

/// |a - b| / max(1, |a|, |b|)
inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)}); }

inline double central_diff(const std::function<double(double)>& g, double x, double h) {
  return (g(x + h) - g(x - h)) / (2.0 * h);
}

/// d g / d F by central differences.
inline Tensor3 fd_tensor_gradient(const std::function<double(const Tensor3&)>& g, const Tensor3& f, double h) {
  Tensor3 out;
  for (std::size_t k = 0; k < 9; ++k) {
    Tensor3 p = f, q = f;
    p.a[k] += h;
    q.a[k] -= h;
    out.a[k] = (g(p) - g(q)) / (2.0 * h);
  }
  return out;
}

/// d G / d F by central differences, entry (iJ, kL) = d G_iJ / d F_kL.
inline Tensor4 fd_tensor_jacobian(const std::function<Tensor3(const Tensor3&)>& g, const Tensor3& f, double h) {
  Tensor4 out;
  for (std::size_t q = 0; q < 9; ++q) {
    Tensor3 p = f, m = f;
    p.a[q] += h;
    m.a[q] -= h;
    const Tensor3 gp = g(p), gm = g(m);
    for (std::size_t r = 0; r < 9; ++r) out.a[9 * r + q] = (gp.a[r] - gm.a[r]) / (2.0 * h);
  }
  return out;
}

inline double max_abs_diff(const Tensor3& a, const Tensor3& b) {
  double w = 0.0;
  for (std::size_t k = 0; k < 9; ++k) w = std::max(w, std::fabs(a.a[k] - b.a[k]));
  return w;
}

inline double max_abs_diff(const Tensor4& a, const Tensor4& b) {
  double w = 0.0;
  for (std::size_t k = 0; k < 81; ++k) w = std::max(w, std::fabs(a.a[k] - b.a[k]));
  return w;
}

inline double max_abs(const Tensor3& a) {
  double w = 0.0;
  for (double v : a.a) w = std::max(w, std::fabs(v));
  return w;
}

inline double max_abs(const Tensor4& a) {
  double w = 0.0;
  for (double v : a.a) w = std::max(w, std::fabs(v));
  return w;
}

/// Largest entry error relative to max(1, largest entry).
inline double rel_tensor_err(const Tensor3& analytic, const Tensor3& fd) {
  return max_abs_diff(analytic, fd) / std::max(1.0, max_abs(fd));
}

inline double rel_tensor_err(const Tensor4& analytic, const Tensor4& fd) {
  return max_abs_diff(analytic, fd) / std::max(1.0, max_abs(fd));
}

}  // namespace pann::test
