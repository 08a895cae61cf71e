#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <random>
#include <thread>

#include "pann/calibration.hpp"
#include "pann/error.hpp"

namespace pann {

namespace {

void require_samples(std::span<const MaterialSample> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyDataset, "calibration slice is empty");
}

double log10_or_special(double mse) noexcept {
  if (!std::isfinite(mse)) return std::numeric_limits<double>::quiet_NaN();
  if (mse <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log10(mse);
}

}  // namespace

std::string_view to_string(RestartStatus s) noexcept {
  return s == RestartStatus::Completed ? "Completed" : "Diverged";
}

double mse_loss(const MaterialLaw& law, std::span<const MaterialSample> samples) {
  require_samples(samples);
  double sum = 0.0;
  for (const auto& s : samples) {
    const double r = uniaxial_stress(law, s.lambda, s.t) - s.stress;
    sum += r * r;
  }
  return sum / static_cast<double>(samples.size());
}

double mse_loss(const PotentialModel& model, std::span<const MaterialSample> samples) {
  return mse_loss(MaterialLaw{model, {}}, samples);
}

// ---------------------------------------------------------------------------
// SobolevLoss
//
// The uniaxial stress is the directional derivative of psi along
// d = (a1, a2, 0, ..., 0) with a1 = 2(l - l^-2), a2 = 2(l - l^-2)/l.

SobolevLoss::SobolevLoss(const PotentialModel& shape, std::span<const MaterialSample> samples,
                         const kernels::KernelSet& kernels)
    : batch_(shape, samples.size(), kernels) {
  require_samples(samples);
  const std::size_t nin = shape.input_dim();
  inputs_.assign(samples.size() * nin, 0.0);
  directions_.assign(samples.size() * nin, 0.0);
  targets_.resize(samples.size());
  predicted_.resize(samples.size());
  adjoint_.resize(samples.size());
  for (std::size_t b = 0; b < samples.size(); ++b) {
    const auto& s = samples[b];
    if (!(s.lambda > 0.0)) throw Error(ErrorCode::InvalidStretch, fmt::format("lambda = {}", s.lambda));
    if (s.t.size() != shape.param_dim()) {
      throw Error(ErrorCode::ShapeMismatch,
                  fmt::format("sample has {} parameters, model expects {}", s.t.size(), shape.param_dim()));
    }
    const auto inv = uniaxial_invariants(s.lambda);
    double* x = inputs_.data() + b * nin;
    x[0] = inv.i1_bar - 3.0;
    x[1] = inv.i2_bar - 3.0;
    std::copy(s.t.begin(), s.t.end(), x + 2);
    const double g = 2.0 * (s.lambda - 1.0 / (s.lambda * s.lambda));
    directions_[b * nin] = g;
    directions_[b * nin + 1] = g / s.lambda;
    targets_[b] = s.stress;
  }
}

double SobolevLoss::value(const PotentialModel& model) {
  batch_.forward(model, inputs_, directions_, predicted_);
  double sum = 0.0;
  for (std::size_t b = 0; b < targets_.size(); ++b) {
    const double r = predicted_[b] - targets_[b];
    sum += r * r;
  }
  return sum / static_cast<double>(targets_.size());
}

double SobolevLoss::value_and_gradient(const PotentialModel& model, std::vector<double>& grad) {
  const double loss = value(model);
  const double scale = 2.0 / static_cast<double>(targets_.size());
  for (std::size_t b = 0; b < targets_.size(); ++b) adjoint_[b] = scale * (predicted_[b] - targets_[b]);
  grad.resize(model.parameters().size());
  batch_.backward(model, adjoint_, grad);
  return loss;
}

// ---------------------------------------------------------------------------
// Optimizer

void adam_step(PotentialModel& model, std::span<const double> gradient, AdamState& state, const AdamHyper& hyper) {
  auto theta = model.parameters();
  if (gradient.size() != theta.size()) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("gradient has {} entries, model has {}", gradient.size(), theta.size()));
  }
  if (state.m.size() != theta.size()) {
    state.m.assign(theta.size(), 0.0);
    state.v.assign(theta.size(), 0.0);
    state.step = 0;
  }
  ++state.step;
  const double k = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(hyper.beta1, k);
  const double c2 = 1.0 - std::pow(hyper.beta2, k);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = gradient[i];
    state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * g;
    state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    theta[i] -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  }
  model.project();
}

std::uint64_t restart_seed(std::uint64_t base, std::size_t k) noexcept {
  // splitmix64 of base + k
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(k) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Restarts

CalibrationResult train_restart(std::span<const MaterialSample> samples, const TrainConfig& config,
                                const ArchitectureSpec& arch, std::size_t restart_index) {
  require_samples(samples);
  if (!(config.adam.learning_rate > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("learning rate {} must be positive", config.adam.learning_rate));
  }
  CalibrationResult result{PotentialModel(arch.architecture, arch.nodes, arch.param_dim), {}};
  auto& rec = result.record;
  rec.seed = restart_seed(config.seed, restart_index);
  rec.restart_index = restart_index;
  rec.adam = config.adam;

  std::mt19937_64 rng(rec.seed);
  initialize_glorot(result.model, rng);

  const auto& kernels = kernels::select_kernels(config.kernels);
  rec.kernels = kernels.name;
  SobolevLoss loss(result.model, samples, kernels);
  AdamState state;
  std::vector<double> grad;

  double current = loss.value(result.model);
  rec.initial_mse = current;
  for (std::size_t epoch = 0; epoch < config.epochs && std::isfinite(current); ++epoch) {
    loss.value_and_gradient(result.model, grad);
    if (!std::all_of(grad.begin(), grad.end(), [](double g) { return std::isfinite(g); })) {
      current = std::numeric_limits<double>::quiet_NaN();
      break;
    }
    adam_step(result.model, grad, state, config.adam);
    ++rec.epochs_run;
    current = loss.value(result.model);
  }
  rec.final_mse = current;
  rec.status = std::isfinite(current) ? RestartStatus::Completed : RestartStatus::Diverged;
  rec.log10_mse = log10_or_special(current);
  return result;
}

std::vector<CalibrationResult> calibrate(std::span<const MaterialSample> samples, const TrainConfig& config,
                                         const ArchitectureSpec& arch) {
  require_samples(samples);
  std::vector<CalibrationResult> results(config.restarts);
  const std::size_t workers = std::clamp<std::size_t>(config.threads, 1, std::max<std::size_t>(config.restarts, 1));
  if (workers <= 1) {
    for (std::size_t k = 0; k < config.restarts; ++k) results[k] = train_restart(samples, config, arch, k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = next++; k < config.restarts; k = next++) {
            results[k] = train_restart(samples, config, arch, k);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::stable_sort(results.begin(), results.end(), [](const CalibrationResult& a, const CalibrationResult& b) {
    const bool da = a.record.status == RestartStatus::Diverged;
    const bool db = b.record.status == RestartStatus::Diverged;
    if (da != db) return db;
    if (da) return a.record.restart_index < b.record.restart_index;
    if (a.record.final_mse != b.record.final_mse) return a.record.final_mse < b.record.final_mse;
    return a.record.restart_index < b.record.restart_index;
  });
  for (std::size_t r = 0; r < results.size(); ++r) results[r].record.restart_rank = r;
  return results;
}

Evaluation evaluate(const MaterialLaw& law, std::span<const MaterialSample> samples) {
  Evaluation ev;
  ev.rows.reserve(samples.size());
  double sum = 0.0;
  for (const auto& s : samples) {
    const double p = uniaxial_stress(law, s.lambda, s.t);
    ev.rows.push_back({s.lambda, s.t, s.stress, p, p - s.stress});
    sum += (p - s.stress) * (p - s.stress);
  }
  ev.defined = !samples.empty();
  ev.mse = ev.defined ? sum / static_cast<double>(samples.size()) : 0.0;
  return ev;
}

}  // namespace pann
