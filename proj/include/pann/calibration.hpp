#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pann/constitutive.hpp"
#include "pann/dataset.hpp"
#include "pann/kernels.hpp"
#include "pann/network.hpp"

namespace pann {

struct AdamHyper {
  double learning_rate = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

/// Full-batch projected ADAM settings. `epochs == 0` returns the initialized model.
struct TrainConfig {
  std::size_t epochs = 20000;
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  AdamHyper adam;
  /// Worker threads for independent restarts; results do not depend on it.
  std::size_t threads = 1;
  kernels::KernelChoice kernels = kernels::KernelChoice::Auto;
};

struct ArchitectureSpec {
  Architecture architecture = Architecture::Monotonic;
  std::size_t nodes = 8;
  std::size_t param_dim = 1;
};

enum class RestartStatus { Completed, Diverged };
std::string_view to_string(RestartStatus s) noexcept;

struct CalibrationRecord {
  double initial_mse = 0.0;
  double final_mse = 0.0;
  /// log10(final_mse) when final_mse > 0, otherwise -inf (or NaN after divergence).
  double log10_mse = 0.0;
  std::size_t epochs_run = 0;
  std::uint64_t seed = 0;
  std::size_t restart_index = 0;
  std::size_t restart_rank = 0;
  RestartStatus status = RestartStatus::Completed;
  AdamHyper adam;
  std::string_view kernels;
};

struct CalibrationResult {
  PotentialModel model;
  CalibrationRecord record;
};

/// (1/N) sum_i (P_i - P(lambda_i; t_i))^2 using the uniaxial stress.
/// Throws EmptyDataset for an empty slice.
double mse_loss(const MaterialLaw& law, std::span<const MaterialSample> samples);
double mse_loss(const PotentialModel& model, std::span<const MaterialSample> samples);

/// Batched loss and parameter gradient on a fixed sample set.
class SobolevLoss {
 public:
  SobolevLoss(const PotentialModel& shape, std::span<const MaterialSample> samples,
              const kernels::KernelSet& kernels = kernels::select_kernels());

  /// Loss only.
  double value(const PotentialModel& model);
  /// Loss, writing d loss / d theta into `grad` (resized to the parameter count).
  double value_and_gradient(const PotentialModel& model, std::vector<double>& grad);

  /// Model stresses of the last evaluation, in sample order.
  [[nodiscard]] std::span<const double> predictions() const noexcept { return predicted_; }

 private:
  DirectionalBatch batch_;
  std::vector<double> inputs_;
  std::vector<double> directions_;
  std::vector<double> targets_;
  std::vector<double> predicted_;
  std::vector<double> adjoint_;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;
};

/// One bias-corrected ADAM step, then projection of constrained weights onto [0, inf).
void adam_step(PotentialModel& model, std::span<const double> gradient, AdamState& state, const AdamHyper& hyper);

/// Seed of restart k derived from the base seed.
std::uint64_t restart_seed(std::uint64_t base, std::size_t k) noexcept;

/// Trains one freshly initialized model.
CalibrationResult train_restart(std::span<const MaterialSample> samples, const TrainConfig& config,
                                const ArchitectureSpec& arch, std::size_t restart_index);

/// Independent restarts sorted ascending by final loss; diverged restarts last.
std::vector<CalibrationResult> calibrate(std::span<const MaterialSample> samples, const TrainConfig& config,
                                         const ArchitectureSpec& arch);

struct Residual {
  double lambda = 0.0;
  std::vector<double> t;
  double stress_data = 0.0;
  double stress_model = 0.0;
  double residual = 0.0;  // model - data
};

struct Evaluation {
  std::vector<Residual> rows;
  double mse = 0.0;
  /// False for an empty slice; mse is then meaningless.
  bool defined = false;
};

Evaluation evaluate(const MaterialLaw& law, std::span<const MaterialSample> samples);

}  // namespace pann
