#include <gtest/gtest.h>

#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "pann/error.hpp"
#include "pann/model_io.hpp"
#include "pann/network.hpp"
#include "support.hpp"

namespace pann {
namespace {

using test::kAllArchitectures;

TEST(Layout, ParameterCounts) {
  EXPECT_EQ(parameter_count(Architecture::Monotonic, 8, 1), 112u);
  EXPECT_EQ(parameter_count(Architecture::ConvexMonotonic, 8, 1), 112u);
  EXPECT_EQ(parameter_count(Architecture::Unrestricted2HL, 8, 1), 112u);
  EXPECT_EQ(parameter_count(Architecture::Unrestricted1HL, 8, 1), 40u);
  for (auto arch : kAllArchitectures)
    for (std::size_t n : {2u, 5u, 16u})
      for (std::size_t m : {1u, 3u}) {
        PotentialModel model(arch, n, m);
        EXPECT_EQ(model.parameters().size(), parameter_count(arch, n, m));
        EXPECT_EQ(sparsity(model).total, parameter_count(arch, n, m));
      }
}

TEST(Layout, ConstraintMaskFollowsArchitecture) {
  for (auto arch : kAllArchitectures) {
    PotentialModel model(arch, 4, 1);
    std::size_t constrained = 0;
    for (auto v : model.constraint_mask()) constrained += v;
    const auto& layers = model.layers();
    if (arch == Architecture::Unrestricted1HL || arch == Architecture::Unrestricted2HL) {
      EXPECT_EQ(constrained, 0u);
    } else if (arch == Architecture::Monotonic) {
      EXPECT_EQ(constrained, 4u * 3u + 4u * 4u + 4u);
    } else {
      EXPECT_EQ(layers[0].input, LayerInput::Params);
      EXPECT_EQ(layers[1].input, LayerInput::InvariantsAndPrevious);
      EXPECT_EQ(constrained, 4u * 1u + 4u * 6u + 4u);
    }
    EXPECT_FALSE(layers.back().has_bias);
    EXPECT_EQ(layers.back().activation, Activation::Linear);
  }
}

TEST(Layout, ZeroParameterDimensionRejected) {
  try {
    PotentialModel model(Architecture::Monotonic, 4, 0);
    FAIL() << "expected InvalidArgument";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Forward, ZeroModelIsZero) {
  std::mt19937_64 rng(21);
  for (auto arch : kAllArchitectures) {
    PotentialModel model(arch, 6, 2);
    const auto s = test::random_state(rng, 2);
    const auto d = evaluate_potential(model, s);
    EXPECT_EQ(d.value, 0.0);
    EXPECT_EQ(d.d_invariants[0], 0.0);
    EXPECT_EQ(d.d_invariants[1], 0.0);
    for (double v : d.d_params) EXPECT_EQ(v, 0.0);
    for (double v : d.hessian.a) EXPECT_EQ(v, 0.0);
  }
}

TEST(Forward, SingleSoftplusNodeGivesLogTwo) {
  PotentialModel model(Architecture::Monotonic, 1, 1);
  model.weights(1)[0] = 1.0;  // Softplus input from the zero Tanh output
  model.weights(2)[0] = 1.0;
  EXPECT_NEAR(forward(model, {3.0, 3.0, {0.0}}), std::log(2.0), 1e-15);
}

TEST(Forward, ShapeMismatchOnParameterCount) {
  PotentialModel model(Architecture::Monotonic, 4, 1);
  try {
    (void)forward(model, {3.0, 3.0, {0.1, 0.2}});
    FAIL() << "expected ShapeMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(Forward, MonotonicInInvariants) {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 100; ++k) {
    const auto model = test::random_model(Architecture::Monotonic, 8, 1, rng);
    const auto t = test::random_params(rng, 1);
    EXPECT_GE(forward(model, {5.0, 4.25, t}), forward(model, {3.0, 3.0, t}));
  }
}

TEST(Derivatives, MatchFiniteDifferences) {
  std::mt19937_64 rng(23);
  const double h = 1e-5;
  for (auto arch : kAllArchitectures) {
    for (int k = 0; k < 30; ++k) {
      const auto model = test::random_model(arch, 8, 2, rng);
      const auto s = test::random_state(rng, 2);
      const auto d = evaluate_potential(model, s);
      EXPECT_DOUBLE_EQ(d.value, forward(model, s));

      auto along = [&](std::size_t input, double x) {
        InvariantState q = s;
        if (input == 0) {
          q.i1_bar = x;
        } else if (input == 1) {
          q.i2_bar = x;
        } else {
          q.t[input - 2] = x;
        }
        return q;
      };
      const double x0[] = {s.i1_bar, s.i2_bar, s.t[0], s.t[1]};
      for (std::size_t in = 0; in < 4; ++in) {
        const double fd = test::central_diff([&](double x) { return forward(model, along(in, x)); }, x0[in], h);
        const double an = in < 2 ? d.d_invariants[in] : d.d_params[in - 2];
        EXPECT_LT(test::rel_err(an, fd), 1e-8) << to_string(arch) << " input " << in;
      }
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
          const double fd = test::central_diff(
              [&](double x) { return grad_invariants(model, along(j, x))[i]; }, x0[j], h);
          EXPECT_LT(test::rel_err(d.hessian(i, j), fd), 1e-7) << to_string(arch);
        }
      EXPECT_NEAR(d.hessian(0, 1), d.hessian(1, 0), 1e-14);
    }
  }
}

TEST(Constraints, MonotonicSweep) {
  std::mt19937_64 rng(24);
  for (auto arch : {Architecture::Monotonic, Architecture::ConvexMonotonic}) {
    for (int k = 0; k < 2000; ++k) {
      const auto model = test::random_model(arch, 8, 1, rng);
      const auto s = test::random_state(rng, 1, 0.8);
      const auto g = grad_invariants(model, s);
      EXPECT_GE(g[0], 0.0);
      EXPECT_GE(g[1], 0.0);
      EXPECT_GE(grad_params(model, s)[0], 0.0);
    }
  }
}

TEST(Constraints, ConvexHessianSweep) {
  std::mt19937_64 rng(25);
  for (int k = 0; k < 2000; ++k) {
    const auto model = test::random_model(Architecture::ConvexMonotonic, 8, 1, rng);
    EXPECT_GE(min_eigenvalue(hessian_invariants(model, test::random_state(rng, 1, 0.8))), -1e-10);
  }
}

TEST(Constraints, ConvexAlongSegments) {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const auto model = test::random_model(Architecture::ConvexMonotonic, 8, 1, rng);
    const auto t = test::random_params(rng, 1);
    const auto a = test::random_state(rng, 1, 0.8), b = test::random_state(rng, 1, 0.8);
    const double alpha = u(rng);
    const InvariantState mid{alpha * a.i1_bar + (1 - alpha) * b.i1_bar, alpha * a.i2_bar + (1 - alpha) * b.i2_bar, t};
    const double lhs = forward(model, mid);
    const double rhs = alpha * forward(model, {a.i1_bar, a.i2_bar, t}) + (1 - alpha) * forward(model, {b.i1_bar, b.i2_bar, t});
    EXPECT_LE(lhs, rhs + 1e-10);
  }
}

TEST(Constraints, ProjectClampsOnlyConstrainedWeights) {
  std::mt19937_64 rng(27);
  for (auto arch : kAllArchitectures) {
    auto model = test::random_model(arch, 5, 1, rng);
    std::normal_distribution<double> n(0.0, 1.0);
    for (double& p : model.parameters()) p = n(rng);
    const std::vector<double> before(model.parameters().begin(), model.parameters().end());
    model.project();
    EXPECT_TRUE(model.satisfies_constraints());
    for (std::size_t i = 0; i < before.size(); ++i) {
      const double expected = model.constraint_mask()[i] ? std::max(before[i], 0.0) : before[i];
      EXPECT_EQ(model.parameters()[i], expected);
    }
  }
}

TEST(Sparsity, FreshModelsAreDense) {
  std::mt19937_64 rng(28);
  for (auto arch : kAllArchitectures) {
    PotentialModel model(arch, 8, 1);
    initialize_glorot(model, rng);
    const auto s = sparsity(model);
    EXPECT_EQ(s.nonzero, s.total) << to_string(arch);
    model.parameters()[0] = 0.0;
    model.parameters()[1] = 0.5 * kSparsityThreshold;
    EXPECT_EQ(sparsity(model).nonzero, s.total - 2);
  }
}

TEST(ModelIo, JsonRoundTripIsExact) {
  std::mt19937_64 rng(29);
  for (auto arch : kAllArchitectures) {
    auto model = test::random_model(arch, 6, 2, rng);
    model.metadata["note"] = "x";
    const auto back = model_from_json(nlohmann::ordered_json::parse(model_to_json(model).dump()));
    EXPECT_EQ(back.architecture(), arch);
    EXPECT_EQ(back.nodes(), 6u);
    EXPECT_EQ(back.param_dim(), 2u);
    ASSERT_EQ(back.parameters().size(), model.parameters().size());
    for (std::size_t i = 0; i < model.parameters().size(); ++i) EXPECT_EQ(back.parameters()[i], model.parameters()[i]);
    EXPECT_EQ(back.metadata, model.metadata);
  }
}

TEST(ModelIo, RejectsBadDocuments) {
  std::mt19937_64 rng(30);
  const auto model = test::random_model(Architecture::Monotonic, 3, 1, rng);
  const auto good = model_to_json(model);
  auto expect_code = [](const nlohmann::ordered_json& doc, ErrorCode code) {
    try {
      (void)model_from_json(doc);
      FAIL() << "expected " << to_string(code);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << e.what();
    }
  };
  auto negative = good;
  negative["layers"][0]["w"][0][0] = -0.5;
  expect_code(negative, ErrorCode::InvalidArgument);
  auto short_row = good;
  short_row["layers"][1]["w"][0].erase(0);
  expect_code(short_row, ErrorCode::ShapeMismatch);
  auto missing = good;
  missing.erase("layers");
  expect_code(missing, ErrorCode::ParseError);
}

TEST(ModelIo, MissingFile) {
  try {
    (void)load_model("/nonexistent/model.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileNotFound);
  }
}

class BatchTest : public ::testing::TestWithParam<Architecture> {};

TEST_P(BatchTest, ForwardMatchesDirectionalDerivative) {
  std::mt19937_64 rng(31);
  const auto model = test::random_model(GetParam(), 7, 2, rng);
  constexpr std::size_t kBatch = 9;
  std::vector<double> inputs, dirs;
  std::vector<InvariantState> states;
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t b = 0; b < kBatch; ++b) {
    states.push_back(test::random_state(rng, 2));
    inputs.insert(inputs.end(), {states[b].i1_bar - 3, states[b].i2_bar - 3, states[b].t[0], states[b].t[1]});
    for (int i = 0; i < 4; ++i) dirs.push_back(n(rng));
  }
  std::vector<const kernels::KernelSet*> sets{&kernels::scalar_kernels()};
  if (auto* k = kernels::avx2_kernels()) sets.push_back(k);
  for (const auto* ks : sets) {
    DirectionalBatch batch(model, kBatch, *ks);
    std::vector<double> out(kBatch);
    batch.forward(model, inputs, dirs, out);
    for (std::size_t b = 0; b < kBatch; ++b) {
      const auto d = evaluate_potential(model, states[b], DerivativeOrder::First);
      const double ref = d.d_invariants[0] * dirs[4 * b] + d.d_invariants[1] * dirs[4 * b + 1] +
                         d.d_params[0] * dirs[4 * b + 2] + d.d_params[1] * dirs[4 * b + 3];
      EXPECT_LT(test::rel_err(out[b], ref), 1e-12) << ks->name;
    }
  }
}

TEST_P(BatchTest, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(32);
  const auto model = test::random_model(GetParam(), 5, 1, rng);
  constexpr std::size_t kBatch = 6;
  std::vector<double> inputs, dirs, adjoint;
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t b = 0; b < kBatch; ++b) {
    const auto s = test::random_state(rng, 1);
    inputs.insert(inputs.end(), {s.i1_bar - 3, s.i2_bar - 3, s.t[0]});
    for (int i = 0; i < 3; ++i) dirs.push_back(n(rng));
    adjoint.push_back(n(rng));
  }
  DirectionalBatch batch(model, kBatch, kernels::scalar_kernels());
  std::vector<double> out(kBatch), grad(model.parameters().size());
  batch.forward(model, inputs, dirs, out);
  batch.backward(model, adjoint, grad);

  auto objective = [&](const PotentialModel& m) {
    DirectionalBatch b2(m, kBatch, kernels::scalar_kernels());
    std::vector<double> o(kBatch);
    b2.forward(m, inputs, dirs, o);
    double s = 0.0;
    for (std::size_t b = 0; b < kBatch; ++b) s += adjoint[b] * o[b];
    return s;
  };
  const double h = 1e-6;
  for (std::size_t p = 0; p < grad.size(); ++p) {
    PotentialModel up = model, down = model;
    up.parameters()[p] += h;
    down.parameters()[p] -= h;
    const double fd = (objective(up) - objective(down)) / (2 * h);
    EXPECT_LT(test::rel_err(grad[p], fd), 1e-7) << "parameter " << p;
  }
}

}  // namespace

void PrintTo(Architecture arch, std::ostream* os) { *os << to_string(arch); }

namespace {

std::string arch_name(const ::testing::TestParamInfo<Architecture>& info) {
  switch (info.param) {
    case Architecture::ConvexMonotonic: return "ConvexMonotonic";
    case Architecture::Monotonic: return "Monotonic";
    case Architecture::Unrestricted1HL: return "Unrestricted1HL";
    case Architecture::Unrestricted2HL: return "Unrestricted2HL";
  }
  return "Unknown";
}

INSTANTIATE_TEST_SUITE_P(AllArchitectures, BatchTest, ::testing::ValuesIn(kAllArchitectures), arch_name);

}  // namespace
}  // namespace pann
