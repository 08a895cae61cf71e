#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "pann/constitutive.hpp"
#include "pann/error.hpp"
#include "pann/stability.hpp"
#include "support.hpp"

namespace pann {
namespace {

MaterialLaw neo(double c) { return {neo_hookean(c), "neo-hookean"}; }

double isochoric_energy(const MaterialLaw& law, const Tensor3& f, const std::vector<double>& t) {
  return strain_energy(law, f, t, 0.0);
}

Vec3 admissible_amplitude(const Tensor3& f, const Vec3& b, std::mt19937_64& rng) {
  const auto basis = admissible_amplitudes(f, b);
  std::normal_distribution<double> n(0.0, 1.0);
  const double x = n(rng), y = n(rng);
  return {x * basis[0][0] + y * basis[1][0], x * basis[0][1] + y * basis[1][1], x * basis[0][2] + y * basis[1][2]};
}

TEST(Directions, UnitAndDeterministic) {
  const auto fib = DirectionSet::fibonacci();
  EXPECT_EQ(fib.vectors.size(), 200u);
  EXPECT_EQ(fib.generator, DirectionGenerator::FibonacciLattice);
  for (const auto& v : fib.vectors) EXPECT_NEAR(norm(v), 1.0, 1e-12);
  const auto again = DirectionSet::fibonacci();
  EXPECT_EQ(fib.vectors, again.vectors);
  const auto grid = DirectionSet::spherical_grid(200);
  EXPECT_FALSE(grid.vectors.empty());
  for (const auto& v : grid.vectors) EXPECT_NEAR(norm(v), 1.0, 1e-12);
}

TEST(AcousticTensor, ZeroPotential) {
  const MaterialLaw zero{PotentialModel(Architecture::Monotonic, 4, 1), "zero"};
  std::mt19937_64 rng(71);
  const Tensor3 q = acoustic_tensor(zero, test::random_unimodular(rng), std::vector<double>{0.5}, test::random_unit(rng));
  EXPECT_EQ(test::max_abs(q), 0.0);
}

TEST(AcousticTensor, MatchesMixedSecondDifferences) {
  std::mt19937_64 rng(72);
  const std::vector<double> t{0.4};
  std::vector<MaterialLaw> laws{neo(0.5), {default_mooney_rivlin_oracle(), "mr"}};
  for (auto arch : test::kAllArchitectures) laws.push_back({test::random_model(arch, 8, 1, rng), "nn"});
  const double h = 1e-4;
  for (const auto& law : laws) {
    for (int k = 0; k < 10; ++k) {
      const Tensor3 f = test::random_unimodular(rng);
      const Vec3 b = test::random_unit(rng);
      const Tensor3 q = acoustic_tensor(law, f, t, b);
      Tensor3 fd;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          Vec3 ei{}, ej{};
          ei[i] = 1.0;
          ej[j] = 1.0;
          const Tensor3 xi = outer(ei, b), xj = outer(ej, b);
          auto w = [&](double s1, double s2) { return isochoric_energy(law, f + s1 * xi + s2 * xj, t); };
          fd(i, j) = (w(h, h) - w(h, -h) - w(-h, h) + w(-h, -h)) / (4 * h * h);
        }
      EXPECT_LT(test::rel_tensor_err(q, fd), 1e-4) << law.label;
    }
  }
}

TEST(AcousticTensor, NeoHookeanAtIdentityPositiveOnAdmissible) {
  std::mt19937_64 rng(73);
  const auto law = neo(0.5);
  for (int k = 0; k < 100; ++k) {
    const Vec3 b = test::random_unit(rng);
    const Vec3 a = admissible_amplitude(Tensor3::identity(), b, rng);
    const Tensor3 q = acoustic_tensor(law, Tensor3::identity(), {}, b);
    EXPECT_GE(dot(a, q * a), 0.0);
    // d^2 I1bar at identity restricted to admissible a (x) b is 2 |a|^2.
    EXPECT_NEAR(dot(a, q * a), 2.0 * 0.5 * dot(a, a), 1e-12 * dot(a, a));
  }
}

TEST(AdmissibleAmplitudes, OrthonormalAndTangent) {
  std::mt19937_64 rng(74);
  for (int k = 0; k < 100; ++k) {
    const Tensor3 f = test::random_unimodular(rng);
    const Vec3 b = test::random_unit(rng);
    const auto basis = admissible_amplitudes(f, b);
    const Tensor3 fit = transpose(inverse(f));
    for (const auto& a : basis) {
      EXPECT_NEAR(norm(a), 1.0, 1e-12);
      EXPECT_NEAR(ddot(outer(a, b), fit), 0.0, 1e-12);
    }
    EXPECT_NEAR(dot(basis[0], basis[1]), 0.0, 1e-12);
  }
}

TEST(Ellipticity, NeoHookeanElliptic) {
  std::mt19937_64 rng(75);
  const auto dirs = DirectionSet::fibonacci();
  for (int k = 0; k < 50; ++k) {
    const auto r = ellipticity_incompressible(neo(0.5), test::random_unimodular(rng, 0.5), {}, dirs);
    EXPECT_TRUE(r.elliptic);
    EXPECT_GE(r.min_value, -kEllipticityTolerance);
  }
}

TEST(Ellipticity, SignFlippedFailsAtModerateStretch) {
  const Tensor3 f = generate_mode({ModeKind::UniaxialTension, {1.5}, {}}).front();
  const auto r = ellipticity_incompressible({sign_flipped_neo_hookean(0.5), "flip"}, f, {}, DirectionSet::fibonacci());
  EXPECT_FALSE(r.elliptic);
  EXPECT_LT(r.min_value, 0.0);
}

TEST(Ellipticity, ZeroPotentialDegenerate) {
  const MaterialLaw zero{PotentialModel(Architecture::Unrestricted2HL, 3, 1), "zero"};
  const Tensor3 f = principal_stretch_state(1.4, 0.8);
  const std::vector<double> t{0.1};
  const auto inc = ellipticity_incompressible(zero, f, t, DirectionSet::fibonacci(20));
  EXPECT_TRUE(inc.elliptic);
  EXPECT_EQ(inc.min_value, 0.0);
  EXPECT_TRUE(ellipticity_compressible(zero, f, t, DirectionSet::fibonacci(20)).elliptic);
}

TEST(Ellipticity, ToleranceIsSpectralAndKeepsOrderingNearSingular) {
  // A_iJkL = M_ik delta_JL gives Q = M for every unit b; at F = I the admissible plane is b-perp.
  auto tangent_for = [](const Vec3& diag) {
    Tensor4 a{};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) a(i, j, i, j) = diag[i];
    return a;
  };
  DirectionSet e2;
  e2.vectors = {{0.0, 1.0, 0.0}};
  const Tensor3 id = Tensor3::identity();
  // Normalized eigenvalue about -1e-7: outside the shift, rejected by both checks. The
  // compressible cubic term alone is tiny here, which is why verdicts do not use raw minima.
  const auto stiff_negative = tangent_for({-1e-3, 1.0, 1e4});
  EXPECT_FALSE(ellipticity_incompressible(stiff_negative, id, e2).elliptic);
  EXPECT_FALSE(ellipticity_compressible(stiff_negative, e2).elliptic);
  // Normalized eigenvalue about -1e-10: inside the shift, accepted by both.
  const auto marginal = tangent_for({-1e-6, 1.0, 1e4});
  EXPECT_TRUE(ellipticity_incompressible(marginal, id, e2).elliptic);
  EXPECT_TRUE(ellipticity_compressible(marginal, e2).elliptic);
  EXPECT_LT(ellipticity_incompressible(marginal, id, e2).min_value, 0.0);
}

TEST(Ellipticity, InvariantUnderDirectionSignFlip) {
  std::mt19937_64 rng(76);
  const auto model = test::random_model(Architecture::Unrestricted2HL, 8, 1, rng);
  const MaterialLaw law{model, "nn"};
  const std::vector<double> t{0.3};
  for (int k = 0; k < 50; ++k) {
    const Tensor3 f = test::random_unimodular(rng);
    const Vec3 b = test::random_unit(rng);
    DirectionSet plus, minus;
    plus.vectors = {b};
    minus.vectors = {{-b[0], -b[1], -b[2]}};
    const auto tangent = pk1_tangent(law, f, t);
    EXPECT_EQ(ellipticity_incompressible(tangent, f, plus).min_value,
              ellipticity_incompressible(tangent, f, minus).min_value);
    EXPECT_EQ(ellipticity_compressible(tangent, plus).min_value, ellipticity_compressible(tangent, minus).min_value);
  }
}

TEST(Ellipticity, IncompressibleConditionsMatchBruteForce) {
  // Elliptic iff a.Q a >= 0 over the admissible plane: compare against a dense circle sweep.
  std::mt19937_64 rng(77);
  const std::vector<double> t{0.5};
  int clear_pass = 0, clear_fail = 0;
  for (int k = 0; k < 200; ++k) {
    const MaterialLaw law{test::random_model(Architecture::Unrestricted2HL, 6, 1, rng), "nn"};
    const Tensor3 f = test::random_unimodular(rng, 0.5);
    const Vec3 b = test::random_unit(rng);
    DirectionSet one;
    one.vectors = {b};
    const auto r = ellipticity_incompressible(law, f, t, one);
    const auto basis = admissible_amplitudes(f, b);
    const Tensor3 q = acoustic_tensor(law, f, t, b);
    double worst = INFINITY, scale = 0.0;
    for (double v : q.a) scale += v * v;
    scale = 1.0 + std::sqrt(scale);
    for (int s = 0; s < 720; ++s) {
      const double th = M_PI * s / 720.0;
      Vec3 a;
      for (int c = 0; c < 3; ++c) a[c] = std::cos(th) * basis[0][c] + std::sin(th) * basis[1][c];
      worst = std::min(worst, dot(a, q * a));
    }
    // Clear margins only; near-degenerate forms are left to the tolerance.
    if (worst > 1e-6 * scale) {
      ++clear_pass;
      EXPECT_TRUE(r.elliptic);
    } else if (worst < -1e-6 * scale) {
      ++clear_fail;
      EXPECT_FALSE(r.elliptic);
    }
  }
  EXPECT_GT(clear_pass, 0);
  EXPECT_GT(clear_fail, 0);
}

TEST(HessianDecomposition, SumsToFullContraction) {
  std::mt19937_64 rng(78);
  const std::vector<double> t{0.6};
  std::vector<MaterialLaw> laws{neo(0.5), {default_mooney_rivlin_oracle(), "mr"}, {i2_only(0.4), "i2"}};
  for (auto arch : test::kAllArchitectures) laws.push_back({test::random_model(arch, 8, 1, rng), "nn"});
  for (const auto& law : laws) {
    for (int k = 0; k < 30; ++k) {
      const Tensor3 f = test::random_unimodular(rng);
      const HessianDecomposition dec(law, f, t);
      const Vec3 b = test::random_unit(rng);
      const Vec3 a = admissible_amplitude(f, b, rng);
      const double full = dec.full(a, b);
      const double sum = dec.constitutive(a, b) + dec.geometric(a, b);
      EXPECT_LE(std::fabs(sum - full), 1e-10 * std::max({1.0, std::fabs(full), std::fabs(dec.geometric(a, b))}))
          << law.label;
    }
  }
  const MaterialLaw zero{PotentialModel(Architecture::Monotonic, 3, 1), "zero"};
  const HessianDecomposition dz(zero, principal_stretch_state(1.3, 0.9), t);
  EXPECT_EQ(dz.constitutive({1, 0, 0}, {0, 1, 0}), 0.0);
  EXPECT_EQ(dz.geometric({1, 0, 0}, {0, 1, 0}), 0.0);
}

TEST(HessianDecomposition, GeometricTermNonNegativeForMonotonic) {
  std::mt19937_64 rng(79);
  const auto dirs = DirectionSet::fibonacci(50);
  for (auto arch : {Architecture::Monotonic, Architecture::ConvexMonotonic}) {
    for (int k = 0; k < 40; ++k) {
      const MaterialLaw law{test::random_model(arch, 8, 1, rng), "nn"};
      const HessianDecomposition dec(law, test::random_unimodular(rng, 0.6), test::random_params(rng, 1));
      for (const auto& b : dirs.vectors) EXPECT_GE(dec.geometric_min(b), -1e-12);
    }
  }
}

TEST(HessianDecomposition, GeometricMinIsMinimumOverAdmissibleCircle) {
  std::mt19937_64 rng(80);
  const MaterialLaw law{{default_mooney_rivlin_oracle()}, "mr"};
  const std::vector<double> t{0.2};
  for (int k = 0; k < 50; ++k) {
    const Tensor3 f = test::random_unimodular(rng);
    const HessianDecomposition dec(law, f, t);
    const Vec3 b = test::random_unit(rng);
    const auto basis = admissible_amplitudes(f, b);
    double worst = INFINITY;
    for (int s = 0; s < 3600; ++s) {
      const double th = M_PI * s / 3600.0;
      Vec3 a;
      for (int c = 0; c < 3; ++c) a[c] = std::cos(th) * basis[0][c] + std::sin(th) * basis[1][c];
      worst = std::min(worst, dec.geometric(a, b));
    }
    EXPECT_LE(dec.geometric_min(b), worst + 1e-12);
    EXPECT_GE(dec.geometric_min(b), worst - 1e-5 * std::max(1.0, std::fabs(worst)));
  }
}

TEST(BakerEricksen, Cases) {
  std::mt19937_64 rng(81);
  for (int k = 0; k < 200; ++k) {
    const Tensor3 f = test::random_unimodular(rng, 0.6);
    EXPECT_TRUE(baker_ericksen_check(neo(0.5), f, {}));
    const MaterialLaw mono{test::random_model(Architecture::Monotonic, 8, 1, rng), "mono"};
    EXPECT_TRUE(baker_ericksen_check(mono, f, test::random_params(rng, 1)));
    EXPECT_FALSE(baker_ericksen_check({sign_flipped_neo_hookean(1.0), "flip"}, f, {}));
  }
}

class ScanTest : public ::testing::Test {
 protected:
  StretchGrid grid_ = StretchGrid::uniform(0.5, 3.0, 12);
  DirectionSet dirs_ = DirectionSet::fibonacci(100);
  std::vector<std::vector<double>> t_grid_{{0.0}, {0.5}, {1.0}};
};

TEST_F(ScanTest, NeoHookeanFullyElliptic) {
  const auto r = scan_invariant_plane(neo(0.5), t_grid_, grid_, dirs_);
  EXPECT_EQ(r.points.size(), 3u * 144u);
  EXPECT_EQ(r.elliptic_fraction, 1.0);
  for (const auto& agg : r.per_parameter) {
    EXPECT_EQ(agg.elliptic_fraction, 1.0);
    EXPECT_EQ(agg.be_fraction, 1.0);
    EXPECT_EQ(agg.failed, 0u);
  }
}

TEST_F(ScanTest, SignFlippedNotFullyElliptic) {
  const auto r = scan_invariant_plane({sign_flipped_neo_hookean(0.5), "flip"}, t_grid_, grid_, dirs_);
  EXPECT_LT(r.elliptic_fraction, 1.0);
  EXPECT_GE(r.elliptic_fraction, 0.0);
}

TEST_F(ScanTest, SecondInvariantOnlyFailsCompressibleCheckSomewhere) {
  const auto r = scan_invariant_plane({i2_only(0.5), "i2"}, {{0.5}}, grid_, dirs_);
  EXPECT_EQ(r.elliptic_fraction, 1.0);
  std::size_t violations = 0;
  for (const auto& p : r.points) violations += p.compressible_elliptic ? 0 : 1;
  EXPECT_GT(violations, 0u);
}

TEST_F(ScanTest, CompressiblePassImpliesIncompressiblePass) {
  std::mt19937_64 rng(82);
  std::vector<MaterialLaw> laws{neo(0.5), {sign_flipped_neo_hookean(0.5), "flip"}, {i2_only(0.5), "i2"},
                                {default_mooney_rivlin_oracle(), "mr"}};
  for (auto arch : test::kAllArchitectures) laws.push_back({test::random_model(arch, 8, 1, rng), "nn"});
  for (const auto& law : laws) {
    const auto r = scan_invariant_plane(law, t_grid_, grid_, dirs_);
    for (const auto& p : r.points)
      if (p.compressible_elliptic) {
        EXPECT_TRUE(p.elliptic) << law.label << " " << p.lambda1 << "," << p.lambda2;
      }
  }
}

TEST_F(ScanTest, MonotonicModelsPassPointwiseChecks) {
  std::mt19937_64 rng(83);
  for (auto arch : {Architecture::Monotonic, Architecture::ConvexMonotonic}) {
    const MaterialLaw law{test::random_model(arch, 8, 1, rng), "nn"};
    const auto r = scan_invariant_plane(law, t_grid_, grid_, dirs_);
    for (const auto& p : r.points) {
      EXPECT_TRUE(p.be_ok);
      EXPECT_TRUE(p.mono_ok);
      EXPECT_TRUE(p.geometric_ok);
      EXPECT_NEAR(det(p.f), 1.0, 1e-12);
    }
  }
}

TEST_F(ScanTest, EmptyGridsRejected) {
  for (const auto& [t_grid, grid] :
       {std::pair{std::vector<std::vector<double>>{}, grid_}, std::pair{t_grid_, StretchGrid{}}}) {
    try {
      (void)scan_invariant_plane(neo(0.5), t_grid, grid, dirs_);
      FAIL() << "expected EmptyGrid";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::EmptyGrid);
    }
  }
}

TEST_F(ScanTest, ReportExports) {
  const auto r = scan_invariant_plane(neo(0.5), {{0.5}}, StretchGrid::uniform(1.0, 2.0, 2), dirs_);
  const auto doc = report_to_json(r);
  EXPECT_EQ(doc["points"].size(), 4u);
  EXPECT_EQ(doc["elliptic_fraction"], 1.0);
  const auto path = std::filesystem::temp_directory_path() / "pann_scan_test.csv";
  write_report_csv(path, r);
  std::ifstream in(path);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "t,lambda1,lambda2,i1,i2,elliptic,min_value,be_ok");
  EXPECT_EQ(first.substr(0, 10), "0.5,1,1,3,");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace pann
