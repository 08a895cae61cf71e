#include "pann/stability.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <fstream>
#include <limits>
#include <numbers>

#include "pann/error.hpp"
#include "pann/kinematics.hpp"

namespace pann {

namespace {

constexpr double kSignTolerance = 1e-12;

Tensor3 symmetric_part(const Tensor3& q) { return 0.5 * (q + transpose(q)); }

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 transpose_times(const Tensor3& m, const Vec3& v) { return transpose(m) * v; }

std::string join_t(const std::vector<double>& t) { return fmt::format("{}", fmt::join(t, ";")); }

}  // namespace

// ---------------------------------------------------------------------------
// Directions

DirectionSet DirectionSet::fibonacci(std::size_t count) {
  DirectionSet set;
  set.generator = DirectionGenerator::FibonacciLattice;
  set.vectors.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    set.vectors.push_back(normalized({r * std::cos(phi), r * std::sin(phi), z}));
  }
  return set;
}

DirectionSet DirectionSet::spherical_grid(std::size_t count) {
  DirectionSet set;
  set.generator = DirectionGenerator::SphericalGrid;
  const auto rows = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(count / 2.0))));
  const auto cols = std::max<std::size_t>(1, (count + rows - 1) / rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const double theta = std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(rows);
    for (std::size_t j = 0; j < cols; ++j) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(cols);
      set.vectors.push_back(
          normalized({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)}));
    }
  }
  return set;
}

// ---------------------------------------------------------------------------
// Acoustic tensor conditions

Tensor3 acoustic_tensor(const Tensor4& tangent, const Vec3& b) {
  Tensor3 q{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t l = 0; l < 3; ++l) s += tangent(i, j, k, l) * b[j] * b[l];
      q(i, k) = s;
    }
  return q;
}

Tensor3 acoustic_tensor(const MaterialLaw& law, const Tensor3& f, std::span<const double> t, const Vec3& b) {
  return acoustic_tensor(pk1_tangent(law, f, t), b);
}

namespace {

/// sym Q / (1 + |sym Q|): every condition below is then free of the tangent's magnitude.
Tensor3 normalized_acoustic(const Tensor4& tangent, const Vec3& b) {
  const Tensor3 q = symmetric_part(acoustic_tensor(tangent, b));
  return (1.0 / (1.0 + norm(q))) * q;
}

/// Verdicts use Q + eps I. A spectral shift keeps the compressible conditions (Q + eps I
/// semi-definite) strictly stronger than the incompressible ones (its restriction to a plane).
Tensor3 shifted(const Tensor3& q) { return q + kEllipticityTolerance * Tensor3::identity(); }

}  // namespace

EllipticityResult ellipticity_incompressible(const Tensor4& tangent, const Tensor3& f, const DirectionSet& dirs) {
  const Tensor3 f_inv = inverse(f);
  EllipticityResult r{true, std::numeric_limits<double>::infinity()};
  for (const auto& b : dirs.vectors) {
    const Tensor3 q = normalized_acoustic(tangent, b);
    const Vec3 v = normalized(transpose_times(f_inv, b));  // F^{-T} b
    const Tensor3 vv = outer(v, v);
    const auto conditions = [&](const Tensor3& m) {
      return std::min(ddot(tensor_cross(m, Tensor3::identity()), vv), ddot(tensor_cross(m, m), vv));
    };
    r.min_value = std::min(r.min_value, conditions(q));
    r.elliptic = r.elliptic && conditions(shifted(q)) >= 0.0;
  }
  if (dirs.vectors.empty()) r.min_value = 0.0;
  return r;
}

EllipticityResult ellipticity_incompressible(const MaterialLaw& law, const Tensor3& f, std::span<const double> t,
                                             const DirectionSet& dirs) {
  return ellipticity_incompressible(pk1_tangent(law, f, t), f, dirs);
}

EllipticityResult ellipticity_compressible(const Tensor4& tangent, const DirectionSet& dirs) {
  EllipticityResult r{true, std::numeric_limits<double>::infinity()};
  const Tensor3 id = Tensor3::identity();
  const auto conditions = [&](const Tensor3& m) {
    const Tensor3 mm = tensor_cross(m, m);
    return std::min({ddot(mm, m), ddot(mm, id), ddot(tensor_cross(m, id), id)});
  };
  for (const auto& b : dirs.vectors) {
    const Tensor3 q = normalized_acoustic(tangent, b);
    r.min_value = std::min(r.min_value, conditions(q));
    r.elliptic = r.elliptic && conditions(shifted(q)) >= 0.0;
  }
  if (dirs.vectors.empty()) r.min_value = 0.0;
  return r;
}

EllipticityResult ellipticity_compressible(const MaterialLaw& law, const Tensor3& f, std::span<const double> t,
                                           const DirectionSet& dirs) {
  return ellipticity_compressible(pk1_tangent(law, f, t), dirs);
}

std::array<Vec3, 2> admissible_amplitudes(const Tensor3& f, const Vec3& b) {
  const Vec3 v = normalized(transpose_times(inverse(f), b));
  // Seed with the axis least aligned with v, then Gram-Schmidt.
  std::size_t axis = 0;
  for (std::size_t k = 1; k < 3; ++k)
    if (std::abs(v[k]) < std::abs(v[axis])) axis = k;
  Vec3 e{};
  e[axis] = 1.0;
  const double ev = dot(e, v);
  const Vec3 a1 = normalized({e[0] - ev * v[0], e[1] - ev * v[1], e[2] - ev * v[2]});
  const Vec3 a2 = normalized(cross(v, a1));
  return {a1, a2};
}

// ---------------------------------------------------------------------------
// Hessian decomposition

HessianDecomposition::HessianDecomposition(const MaterialLaw& law, const Tensor3& f, std::span<const double> t)
    : f_(f), h_(cofactor(f)), tangent_(pk1_tangent(law, f, t)) {
  const auto inv = isochoric_invariants(f);
  const auto r = evaluate_law(law, {inv.i1_bar, inv.i2_bar, std::vector<double>(t.begin(), t.end())});
  psi_ = r.coefficients;
  hess_ = r.hessian;
}

double HessianDecomposition::constitutive(const Vec3& a, const Vec3& b) const {
  const Tensor3 x = outer(a, b);
  const double d1 = ddot(f_, x);
  const double d2 = ddot(h_, tensor_cross(x, f_));
  return 4.0 * (hess_(0, 0) * d1 * d1 + 2.0 * hess_(0, 1) * d1 * d2 + hess_(1, 1) * d2 * d2);
}

double HessianDecomposition::geometric(const Vec3& a, const Vec3& b) const {
  const Tensor3 x = outer(a, b);
  const Tensor3 xf = tensor_cross(x, f_);
  return 2.0 * (psi_[0] * ddot(x, x) + psi_[1] * ddot(xf, xf));
}

double HessianDecomposition::full(const Vec3& a, const Vec3& b) const {
  const Tensor3 x = outer(a, b);
  return contract(x, tangent_, x);
}

double HessianDecomposition::geometric_min(const Vec3& b) const {
  const auto [a1, a2] = admissible_amplitudes(f_, b);
  const Vec3 s{a1[0] + a2[0], a1[1] + a2[1], a1[2] + a2[2]};
  Matrix2 g;
  g(0, 0) = geometric(a1, b);
  g(1, 1) = geometric(a2, b);
  // polarization: g(a1 + a2) = g11 + 2 g12 + g22
  g(0, 1) = g(1, 0) = 0.5 * (geometric(s, b) - g(0, 0) - g(1, 1));
  return min_eigenvalue(g);
}

bool baker_ericksen_check(const MaterialLaw& law, const Tensor3& f, std::span<const double> t) {
  const auto inv = isochoric_invariants(f);
  const auto c = stress_coefficients(law, {inv.i1_bar, inv.i2_bar, std::vector<double>(t.begin(), t.end())});
  const Vec3 stretches = principal_stretches(f);
  return std::all_of(stretches.begin(), stretches.end(),
                     [&](double l) { return c[0] + l * l * c[1] >= -kSignTolerance; });
}

// ---------------------------------------------------------------------------
// Scan

StretchGrid StretchGrid::uniform(double lo, double hi, std::size_t n) {
  StretchGrid g;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    g.lambda1.push_back(v);
  }
  g.lambda2 = g.lambda1;
  return g;
}

StabilityReport scan_invariant_plane(const MaterialLaw& law, const std::vector<std::vector<double>>& t_grid,
                                     const StretchGrid& stretches, const DirectionSet& dirs) {
  if (t_grid.empty()) throw Error(ErrorCode::EmptyGrid, "parameter grid is empty");
  if (stretches.lambda1.empty() || stretches.lambda2.empty()) throw Error(ErrorCode::EmptyGrid, "stretch grid is empty");
  if (dirs.vectors.empty()) throw Error(ErrorCode::EmptyGrid, "direction set is empty");

  StabilityReport report;
  report.label = law.label;
  report.region = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  std::size_t evaluated = 0, elliptic = 0;

  for (const auto& t : t_grid) {
    ScanAggregate agg;
    agg.t = t;
    for (double l1 : stretches.lambda1) {
      for (double l2 : stretches.lambda2) {
        ScanPoint p;
        p.t = t;
        p.lambda1 = l1;
        p.lambda2 = l2;
        ++agg.points;
        try {
          p.f = principal_stretch_state(l1, l2);
          const auto inv = isochoric_invariants(p.f);
          p.i1 = inv.i1_bar;
          p.i2 = inv.i2_bar;
          const HessianDecomposition dec(law, p.f, t);
          const auto inc = ellipticity_incompressible(dec.tangent(), p.f, dirs);
          const auto comp = ellipticity_compressible(dec.tangent(), dirs);
          p.elliptic = inc.elliptic;
          p.min_value = inc.min_value;
          p.compressible_elliptic = comp.elliptic;
          p.be_ok = baker_ericksen_check(law, p.f, t);

          const auto r = evaluate_law(law, {p.i1, p.i2, t});
          p.mono_ok = r.coefficients[0] >= -kSignTolerance && r.coefficients[1] >= -kSignTolerance &&
                      std::all_of(r.d_params.begin(), r.d_params.end(),
                                  [](double d) { return d >= -kSignTolerance; });
          double geo_min = std::numeric_limits<double>::infinity();
          double geo_scale = 0.0;
          for (const auto& b : dirs.vectors) {
            geo_min = std::min(geo_min, dec.geometric_min(b));
            geo_scale = std::max(geo_scale, norm(acoustic_tensor(dec.tangent(), b)));
          }
          p.geometric_ok = geo_min >= -kEllipticityTolerance * (1.0 + geo_scale);

          report.region.i1_min = std::min(report.region.i1_min, p.i1);
          report.region.i1_max = std::max(report.region.i1_max, p.i1);
          report.region.i2_min = std::min(report.region.i2_min, p.i2);
          report.region.i2_max = std::max(report.region.i2_max, p.i2);
          agg.elliptic += p.elliptic;
          agg.compressible_elliptic += p.compressible_elliptic;
          agg.be_ok += p.be_ok;
          agg.mono_ok += p.mono_ok;
        } catch (const Error& e) {
          p.error = e.what();
          ++agg.failed;
        }
        report.points.push_back(std::move(p));
      }
    }
    const std::size_t ok = agg.points - agg.failed;
    agg.elliptic_fraction = ok ? static_cast<double>(agg.elliptic) / static_cast<double>(ok) : 0.0;
    agg.be_fraction = ok ? static_cast<double>(agg.be_ok) / static_cast<double>(ok) : 0.0;
    evaluated += ok;
    elliptic += agg.elliptic;
    report.per_parameter.push_back(std::move(agg));
  }
  report.elliptic_fraction = evaluated ? static_cast<double>(elliptic) / static_cast<double>(evaluated) : 0.0;
  return report;
}

nlohmann::ordered_json report_to_json(const StabilityReport& report) {
  nlohmann::ordered_json doc;
  doc["label"] = report.label;
  doc["elliptic_fraction"] = report.elliptic_fraction;
  doc["region"] = {{"i1_min", report.region.i1_min},
                   {"i1_max", report.region.i1_max},
                   {"i2_min", report.region.i2_min},
                   {"i2_max", report.region.i2_max}};
  auto aggs = nlohmann::ordered_json::array();
  for (const auto& a : report.per_parameter) {
    nlohmann::ordered_json j;
    j["t"] = a.t;
    j["points"] = a.points;
    j["failed"] = a.failed;
    j["elliptic"] = a.elliptic;
    j["compressible_elliptic"] = a.compressible_elliptic;
    j["be_ok"] = a.be_ok;
    j["mono_ok"] = a.mono_ok;
    j["elliptic_fraction"] = a.elliptic_fraction;
    j["be_fraction"] = a.be_fraction;
    aggs.push_back(std::move(j));
  }
  doc["per_parameter"] = std::move(aggs);
  auto pts = nlohmann::ordered_json::array();
  for (const auto& p : report.points) {
    nlohmann::ordered_json j;
    j["t"] = p.t;
    j["lambda1"] = p.lambda1;
    j["lambda2"] = p.lambda2;
    j["f"] = p.f.a;
    j["i1"] = p.i1;
    j["i2"] = p.i2;
    j["elliptic"] = p.elliptic;
    j["min_condition_value"] = p.min_value;
    j["compressible_elliptic"] = p.compressible_elliptic;
    j["be_ok"] = p.be_ok;
    j["mono_ok"] = p.mono_ok;
    j["geometric_ok"] = p.geometric_ok;
    if (!p.error.empty()) j["error"] = p.error;
    pts.push_back(std::move(j));
  }
  doc["points"] = std::move(pts);
  return doc;
}

void write_report_csv(const std::filesystem::path& path, const StabilityReport& report) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", path.string()));
  out << "t,lambda1,lambda2,i1,i2,elliptic,min_value,be_ok\n";
  for (const auto& p : report.points) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", join_t(p.t), p.lambda1, p.lambda2, p.i1, p.i2, int(p.elliptic),
                       p.min_value, int(p.be_ok));
  }
  if (!out) throw Error(ErrorCode::IoError, fmt::format("write failed for {}", path.string()));
}

}  // namespace pann
