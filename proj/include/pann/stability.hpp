#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pann/constitutive.hpp"
#include "pann/tensor.hpp"

namespace pann {

enum class DirectionGenerator { FibonacciLattice, SphericalGrid };

/// Deterministic unit vectors on the sphere.
struct DirectionSet {
  std::vector<Vec3> vectors;
  DirectionGenerator generator = DirectionGenerator::FibonacciLattice;

  static DirectionSet fibonacci(std::size_t count = 200);
  /// Polar x azimuth product with about `count` points (exact count is rows * cols).
  static DirectionSet spherical_grid(std::size_t count = 200);
};

/// Q_ik = A_ijkl b_j b_l
Tensor3 acoustic_tensor(const Tensor4& tangent, const Vec3& b);
Tensor3 acoustic_tensor(const MaterialLaw& law, const Tensor3& f, std::span<const double> t, const Vec3& b);

struct EllipticityResult {
  bool elliptic = true;
  /// Smallest scaled condition value over all directions. The tolerance on
  /// each condition is 1e-8 times the matching power of (1 + |Q|).
  double min_value = 0.0;
};

/// Each condition is evaluated on sym Q / (1 + |sym Q|). min_value reports that unshifted minimum;
/// the verdict requires every condition to hold for the shifted tensor Q + kEllipticityTolerance I.
inline constexpr double kEllipticityTolerance = 1e-8;

/// With v = F^{-T} b normalized:
///   (Q x I):(v (x) v) = tr Q - v.Qv >= 0
///   (Q x Q):(v (x) v) = 2 v.cof(Q) v >= 0
/// which together state that Q is positive semi-definite on the plane orthogonal to v.
EllipticityResult ellipticity_incompressible(const Tensor4& tangent, const Tensor3& f, const DirectionSet& dirs);
EllipticityResult ellipticity_incompressible(const MaterialLaw& law, const Tensor3& f, std::span<const double> t,
                                             const DirectionSet& dirs);

/// (Q x Q):Q = 6 det Q, (Q x Q):I = 2 tr cof Q, (Q x I):I = 2 tr Q, all >= 0.
EllipticityResult ellipticity_compressible(const Tensor4& tangent, const DirectionSet& dirs);
EllipticityResult ellipticity_compressible(const MaterialLaw& law, const Tensor3& f, std::span<const double> t,
                                           const DirectionSet& dirs);

/// Orthonormal basis of the amplitudes a with (a (x) b) : F^{-T} = 0.
std::array<Vec3, 2> admissible_amplitudes(const Tensor3& f, const Vec3& b);

/// Split of the second variation along rank-one X = a (x) b on SL(3):
///   constitutive = 4 [psi_11 (F:X)^2 + 2 psi_12 (F:X)(H:(X x F)) + psi_22 (H:(X x F))^2]
///   geometric    = 2 [psi_1 X:X + psi_2 (X x F):(X x F)]
/// with H = cof F. Their sum equals X : A : X when a is admissible.
class HessianDecomposition {
 public:
  HessianDecomposition(const MaterialLaw& law, const Tensor3& f, std::span<const double> t);

  [[nodiscard]] double constitutive(const Vec3& a, const Vec3& b) const;
  [[nodiscard]] double geometric(const Vec3& a, const Vec3& b) const;
  /// X : A : X from pk1_tangent.
  [[nodiscard]] double full(const Vec3& a, const Vec3& b) const;

  /// Smallest eigenvalue of the geometric form restricted to admissible a, for fixed b.
  [[nodiscard]] double geometric_min(const Vec3& b) const;

  [[nodiscard]] const Tensor3& deformation() const noexcept { return f_; }
  [[nodiscard]] const Tensor4& tangent() const noexcept { return tangent_; }

 private:
  Tensor3 f_;
  Tensor3 h_;
  std::array<double, 2> psi_{};
  Matrix2 hess_;
  Tensor4 tangent_;
};

/// psi_1 + lambda_i^2 psi_2 >= -1e-12 for the three principal stretches of f.
bool baker_ericksen_check(const MaterialLaw& law, const Tensor3& f, std::span<const double> t);

struct StretchGrid {
  std::vector<double> lambda1;
  std::vector<double> lambda2;

  /// n evenly spaced values on [lo, hi] for both axes.
  static StretchGrid uniform(double lo, double hi, std::size_t n);
};

struct ScanPoint {
  std::vector<double> t;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  Tensor3 f;
  double i1 = 3.0;
  double i2 = 3.0;
  bool elliptic = false;
  double min_value = 0.0;
  bool compressible_elliptic = false;
  bool be_ok = false;
  /// Stress coefficients and parameter derivatives non-negative.
  bool mono_ok = false;
  /// Geometric term non-negative on every sampled direction.
  bool geometric_ok = false;
  /// Non-empty when the point could not be evaluated.
  std::string error;
};

struct ScanAggregate {
  std::vector<double> t;
  std::size_t points = 0;
  std::size_t failed = 0;
  std::size_t elliptic = 0;
  std::size_t compressible_elliptic = 0;
  std::size_t be_ok = 0;
  std::size_t mono_ok = 0;
  double elliptic_fraction = 0.0;  // over evaluated points
  double be_fraction = 0.0;
};

struct InvariantRange {
  double i1_min = 0.0, i1_max = 0.0;
  double i2_min = 0.0, i2_max = 0.0;
};

struct StabilityReport {
  std::string label;
  std::vector<ScanPoint> points;
  std::vector<ScanAggregate> per_parameter;
  double elliptic_fraction = 0.0;
  InvariantRange region;
};

/// Sweeps F = diag(l1, l2, 1/(l1 l2)) for every parameter vector. Points that
/// throw are recorded with their message and excluded from the fractions.
/// Throws EmptyGrid when either grid is empty.
StabilityReport scan_invariant_plane(const MaterialLaw& law, const std::vector<std::vector<double>>& t_grid,
                                     const StretchGrid& stretches, const DirectionSet& dirs);

nlohmann::ordered_json report_to_json(const StabilityReport& report);

/// `t,lambda1,lambda2,i1,i2,elliptic,min_value,be_ok`
void write_report_csv(const std::filesystem::path& path, const StabilityReport& report);

}  // namespace pann
