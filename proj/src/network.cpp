#include "pann/network.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "pann/error.hpp"

namespace pann {

namespace {

struct ActivationValues {
  double value, d1, d2;
};

ActivationValues activate(Activation act, double z) noexcept {
  switch (act) {
    case Activation::Tanh: {
      const double t = std::tanh(z);
      const double d1 = 1.0 - t * t;
      return {t, d1, -2.0 * t * d1};
    }
    case Activation::Softplus: {
      const double sp = std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
      const double e = std::exp(-std::fabs(z));
      const double sig = z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
      return {sp, sig, sig * (1.0 - sig)};
    }
    case Activation::Linear:
      break;
  }
  return {z, 1.0, 0.0};
}

bool uses_invariants(LayerInput in) noexcept {
  return in == LayerInput::InvariantsAndParams || in == LayerInput::InvariantsAndPrevious;
}

bool uses_previous(LayerInput in) noexcept {
  return in == LayerInput::InvariantsAndPrevious || in == LayerInput::Previous;
}

void check_state(const PotentialModel& model, const InvariantState& state) {
  if (state.t.size() != model.param_dim()) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("model expects {} parameters, state has {}", model.param_dim(), state.t.size()));
  }
  if (model.layers().empty()) throw Error(ErrorCode::ShapeMismatch, "model has no layers");
}

}  // namespace

std::string_view to_string(Architecture arch) noexcept {
  switch (arch) {
    case Architecture::ConvexMonotonic: return "convex-monotonic";
    case Architecture::Monotonic: return "monotonic";
    case Architecture::Unrestricted1HL: return "unrestricted-1hl";
    case Architecture::Unrestricted2HL: return "unrestricted-2hl";
  }
  return "unknown";
}

std::string_view to_string(Activation act) noexcept {
  switch (act) {
    case Activation::Tanh: return "tanh";
    case Activation::Softplus: return "softplus";
    case Activation::Linear: return "linear";
  }
  return "unknown";
}

std::string_view to_string(WeightConstraint c) noexcept {
  return c == WeightConstraint::NonNegative ? "non-negative" : "free";
}

Architecture parse_architecture(std::string_view name) {
  for (auto a : {Architecture::ConvexMonotonic, Architecture::Monotonic, Architecture::Unrestricted1HL,
                 Architecture::Unrestricted2HL}) {
    if (name == to_string(a)) return a;
  }
  throw Error(ErrorCode::ParseError, fmt::format("unknown architecture '{}'", name));
}

Activation parse_activation(std::string_view name) {
  for (auto a : {Activation::Tanh, Activation::Softplus, Activation::Linear}) {
    if (name == to_string(a)) return a;
  }
  throw Error(ErrorCode::ParseError, fmt::format("unknown activation '{}'", name));
}

WeightConstraint parse_weight_constraint(std::string_view name) {
  if (name == "free") return WeightConstraint::Free;
  if (name == "non-negative") return WeightConstraint::NonNegative;
  throw Error(ErrorCode::ParseError, fmt::format("unknown weight constraint '{}'", name));
}

std::size_t parameter_count(Architecture arch, std::size_t n, std::size_t m) {
  if (arch == Architecture::Unrestricted1HL) return n * (m + 4);
  return n * n + n * (m + 5);
}

std::vector<LayerSpec> layer_layout(Architecture arch, std::size_t n, std::size_t m) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "nodes per layer must be positive");
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "parameter dimension must be positive");

  const auto constraint = (arch == Architecture::Monotonic || arch == Architecture::ConvexMonotonic)
                              ? WeightConstraint::NonNegative
                              : WeightConstraint::Free;
  std::vector<LayerSpec> layers;
  if (arch == Architecture::ConvexMonotonic) {
    layers.push_back({m, n, Activation::Tanh, constraint, LayerInput::Params, true, 0, 0});
    layers.push_back({2 + n, n, Activation::Softplus, constraint, LayerInput::InvariantsAndPrevious, true, 0, 0});
  } else {
    layers.push_back({2 + m, n, Activation::Tanh, constraint, LayerInput::InvariantsAndParams, true, 0, 0});
    if (arch != Architecture::Unrestricted1HL) {
      layers.push_back({n, n, Activation::Softplus, constraint, LayerInput::Previous, true, 0, 0});
    }
  }
  layers.push_back({n, 1, Activation::Linear, constraint, LayerInput::Previous, false, 0, 0});

  std::size_t offset = 0;
  for (auto& l : layers) {
    l.weight_offset = offset;
    offset += l.width * l.in_dim;
    if (l.has_bias) {
      l.bias_offset = offset;
      offset += l.width;
    }
  }
  return layers;
}

PotentialModel::PotentialModel(Architecture arch, std::size_t n, std::size_t m)
    : arch_(arch), n_(n), m_(m), layers_(layer_layout(arch, n, m)) {
  params_.assign(parameter_count(arch, n, m), 0.0);
  mask_.assign(params_.size(), 0);
  for (const auto& l : layers_) {
    if (l.weight_constraint != WeightConstraint::NonNegative) continue;
    std::fill_n(mask_.begin() + static_cast<std::ptrdiff_t>(l.weight_offset), l.width * l.in_dim, 1);
  }
}

std::span<const double> PotentialModel::weights(std::size_t layer) const {
  const auto& l = layers_.at(layer);
  return std::span<const double>(params_).subspan(l.weight_offset, l.width * l.in_dim);
}

std::span<double> PotentialModel::weights(std::size_t layer) {
  const auto& l = layers_.at(layer);
  return std::span<double>(params_).subspan(l.weight_offset, l.width * l.in_dim);
}

std::span<const double> PotentialModel::bias(std::size_t layer) const {
  const auto& l = layers_.at(layer);
  if (!l.has_bias) return {};
  return std::span<const double>(params_).subspan(l.bias_offset, l.width);
}

std::span<double> PotentialModel::bias(std::size_t layer) {
  const auto& l = layers_.at(layer);
  if (!l.has_bias) return {};
  return std::span<double>(params_).subspan(l.bias_offset, l.width);
}

void PotentialModel::project() noexcept {
  for (std::size_t k = 0; k < params_.size(); ++k) {
    if (mask_[k] && params_[k] < 0.0) params_[k] = 0.0;
  }
}

bool PotentialModel::satisfies_constraints() const noexcept {
  for (std::size_t k = 0; k < params_.size(); ++k) {
    if (mask_[k] && !(params_[k] >= 0.0)) return false;
  }
  return true;
}

// Nonzero so that a fresh model has no exactly-zero parameter.
constexpr double kBiasInitScale = 0.01;

void initialize_glorot(PotentialModel& model, std::mt19937_64& rng) {
  for (std::size_t li = 0; li < model.layers().size(); ++li) {
    const auto& l = model.layers()[li];
    const double limit = std::sqrt(6.0 / static_cast<double>(l.in_dim + l.width));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : model.weights(li)) {
      w = dist(rng);
      if (l.weight_constraint == WeightConstraint::NonNegative) w = std::fabs(w);
    }
    std::uniform_real_distribution<double> bias_dist(-kBiasInitScale * limit, kBiasInitScale * limit);
    for (double& b : model.bias(li)) b = bias_dist(rng);
  }
}

double min_eigenvalue(const Matrix2& m) noexcept {
  const double mean = 0.5 * (m(0, 0) + m(1, 1));
  const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
  const double off = 0.5 * (m(0, 1) + m(1, 0));
  return mean - std::hypot(half_diff, off);
}

PotentialDerivatives evaluate_potential(const PotentialModel& model, const InvariantState& state,
                                        DerivativeOrder order) {
  check_state(model, state);
  const std::size_t m = model.param_dim();
  const std::size_t dirs = order == DerivativeOrder::Value ? 0 : 2 + m;
  const bool second = order == DerivativeOrder::Second;
  constexpr std::size_t kPairs = 3;  // (I1,I1), (I1,I2), (I2,I2)
  constexpr std::array<std::array<std::size_t, 2>, kPairs> pair_index{{{0, 0}, {0, 1}, {1, 1}}};

  const std::array<double, 2> y{state.i1_bar - 3.0, state.i2_bar - 3.0};

  // Per-layer values x, tangents x_dot[d][j], second tangents x_ddot[p][j].
  std::vector<double> x, x_dot, x_ddot;
  std::vector<double> u, u_dot, u_ddot, z, z_dot, z_ddot;

  for (std::size_t li = 0; li < model.layers().size(); ++li) {
    const LayerSpec& l = model.layers()[li];
    const std::size_t in = l.in_dim, w = l.width;

    u.assign(in, 0.0);
    u_dot.assign(dirs * in, 0.0);
    u_ddot.assign(second ? kPairs * in : 0, 0.0);
    std::size_t pos = 0;
    if (uses_invariants(l.input)) {
      for (std::size_t a = 0; a < 2; ++a, ++pos) {
        u[pos] = y[a];
        if (dirs) u_dot[a * in + pos] = 1.0;
      }
    }
    if (l.input == LayerInput::InvariantsAndParams || l.input == LayerInput::Params) {
      for (std::size_t k = 0; k < m; ++k, ++pos) {
        u[pos] = state.t[k];
        if (dirs) u_dot[(2 + k) * in + pos] = 1.0;
      }
    }
    if (uses_previous(l.input)) {
      const std::size_t prev = x.size();
      for (std::size_t j = 0; j < prev; ++j) {
        u[pos + j] = x[j];
        for (std::size_t d = 0; d < dirs; ++d) u_dot[d * in + pos + j] = x_dot[d * prev + j];
        if (second)
          for (std::size_t p = 0; p < kPairs; ++p) u_ddot[p * in + pos + j] = x_ddot[p * prev + j];
      }
      pos += prev;
    }
    if (pos != in) throw Error(ErrorCode::ShapeMismatch, fmt::format("layer {} input width {} != {}", li, pos, in));

    const auto wts = model.weights(li);
    const auto b = model.bias(li);
    z.assign(w, 0.0);
    z_dot.assign(dirs * w, 0.0);
    z_ddot.assign(second ? kPairs * w : 0, 0.0);
    for (std::size_t o = 0; o < w; ++o) {
      const double* row = wts.data() + o * in;
      double s = b.empty() ? 0.0 : b[o];
      for (std::size_t i = 0; i < in; ++i) s += row[i] * u[i];
      z[o] = s;
      for (std::size_t d = 0; d < dirs; ++d) {
        double sd = 0.0;
        for (std::size_t i = 0; i < in; ++i) sd += row[i] * u_dot[d * in + i];
        z_dot[d * w + o] = sd;
      }
      if (second)
        for (std::size_t p = 0; p < kPairs; ++p) {
          double sp = 0.0;
          for (std::size_t i = 0; i < in; ++i) sp += row[i] * u_ddot[p * in + i];
          z_ddot[p * w + o] = sp;
        }
    }

    x.assign(w, 0.0);
    x_dot.assign(dirs * w, 0.0);
    x_ddot.assign(second ? kPairs * w : 0, 0.0);
    for (std::size_t o = 0; o < w; ++o) {
      const auto act = activate(l.activation, z[o]);
      x[o] = act.value;
      for (std::size_t d = 0; d < dirs; ++d) x_dot[d * w + o] = act.d1 * z_dot[d * w + o];
      if (second)
        for (std::size_t p = 0; p < kPairs; ++p) {
          const auto [da, db] = pair_index[p];
          x_ddot[p * w + o] = act.d2 * z_dot[da * w + o] * z_dot[db * w + o] + act.d1 * z_ddot[p * w + o];
        }
    }
  }

  PotentialDerivatives out;
  out.value = x.at(0);
  if (dirs) {
    out.d_invariants = {x_dot[0], x_dot[1]};
    out.d_params.assign(x_dot.begin() + 2, x_dot.begin() + static_cast<std::ptrdiff_t>(2 + m));
  }
  if (second) {
    out.hessian(0, 0) = x_ddot[0];
    out.hessian(0, 1) = out.hessian(1, 0) = x_ddot[1];
    out.hessian(1, 1) = x_ddot[2];
  }
  return out;
}

double forward(const PotentialModel& model, const InvariantState& state) {
  return evaluate_potential(model, state, DerivativeOrder::Value).value;
}

std::array<double, 2> grad_invariants(const PotentialModel& model, const InvariantState& state) {
  return evaluate_potential(model, state, DerivativeOrder::First).d_invariants;
}

std::vector<double> grad_params(const PotentialModel& model, const InvariantState& state) {
  return evaluate_potential(model, state, DerivativeOrder::First).d_params;
}

Matrix2 hessian_invariants(const PotentialModel& model, const InvariantState& state) {
  return evaluate_potential(model, state, DerivativeOrder::Second).hessian;
}

SparsityCount sparsity(const PotentialModel& model) {
  SparsityCount c;
  c.total = model.parameters().size();
  c.nonzero = static_cast<std::size_t>(std::count_if(model.parameters().begin(), model.parameters().end(),
                                                     [](double v) { return std::fabs(v) > kSparsityThreshold; }));
  return c;
}

// ---------------------------------------------------------------------------
// DirectionalBatch

DirectionalBatch::DirectionalBatch(const PotentialModel& shape, std::size_t batch,
                                   const kernels::KernelSet& kernels)
    : kernels_(&kernels), batch_(batch), input_dim_(shape.input_dim()) {
  buffers_.resize(shape.layers().size());
  for (std::size_t li = 0; li < shape.layers().size(); ++li) {
    const auto& l = shape.layers()[li];
    auto& buf = buffers_[li];
    buf.weights_t.resize(l.in_dim * l.width);
    buf.grad_wt.resize(l.in_dim * l.width);
    buf.u.resize(batch * l.in_dim);
    buf.u_dot.resize(batch * l.in_dim);
    buf.bar_u.resize(batch * l.in_dim);
    buf.bar_u_dot.resize(batch * l.in_dim);
    for (auto* v : {&buf.z, &buf.z_dot, &buf.x, &buf.x_dot, &buf.s1, &buf.s2, &buf.bar_z, &buf.bar_z_dot})
      v->resize(batch * l.width);
  }
}

void DirectionalBatch::forward(const PotentialModel& model, std::span<const double> inputs,
                               std::span<const double> directions, std::span<double> out) {
  const std::size_t nin = input_dim_;
  if (inputs.size() != batch_ * nin || directions.size() != batch_ * nin || out.size() != batch_ ||
      model.layers().size() != buffers_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "directional batch buffers do not match the inputs");
  }
  const std::size_t m = model.param_dim();

  for (std::size_t li = 0; li < model.layers().size(); ++li) {
    const LayerSpec& l = model.layers()[li];
    auto& buf = buffers_[li];
    const std::size_t in = l.in_dim, w = l.width;

    const auto wts = model.weights(li);
    for (std::size_t o = 0; o < w; ++o)
      for (std::size_t i = 0; i < in; ++i) buf.weights_t[i * w + o] = wts[o * in + i];

    const LayerBuffers* prev = li > 0 ? &buffers_[li - 1] : nullptr;
    const std::size_t prev_w = li > 0 ? model.layers()[li - 1].width : 0;
    for (std::size_t b = 0; b < batch_; ++b) {
      double* u = buf.u.data() + b * in;
      double* ud = buf.u_dot.data() + b * in;
      const double* xin = inputs.data() + b * nin;
      const double* din = directions.data() + b * nin;
      std::size_t pos = 0;
      switch (l.input) {
        case LayerInput::InvariantsAndParams:
          for (std::size_t k = 0; k < nin; ++k, ++pos) {
            u[pos] = xin[k];
            ud[pos] = din[k];
          }
          break;
        case LayerInput::Params:
          for (std::size_t k = 0; k < m; ++k, ++pos) {
            u[pos] = xin[2 + k];
            ud[pos] = din[2 + k];
          }
          break;
        case LayerInput::InvariantsAndPrevious:
          for (std::size_t k = 0; k < 2; ++k, ++pos) {
            u[pos] = xin[k];
            ud[pos] = din[k];
          }
          [[fallthrough]];
        case LayerInput::Previous:
          for (std::size_t j = 0; j < prev_w; ++j, ++pos) {
            u[pos] = prev->x[b * prev_w + j];
            ud[pos] = prev->x_dot[b * prev_w + j];
          }
          break;
      }
    }

    kernels_->affine({buf.u, buf.weights_t, model.bias(li), batch_, in, w}, buf.z);
    kernels_->affine({buf.u_dot, buf.weights_t, {}, batch_, in, w}, buf.z_dot);
    for (std::size_t k = 0; k < batch_ * w; ++k) {
      const auto act = activate(l.activation, buf.z[k]);
      buf.x[k] = act.value;
      buf.s1[k] = act.d1;
      buf.s2[k] = act.d2;
      buf.x_dot[k] = act.d1 * buf.z_dot[k];
    }
  }

  const auto& last = buffers_.back();
  for (std::size_t b = 0; b < batch_; ++b) out[b] = last.x_dot[b];
}

void DirectionalBatch::backward(const PotentialModel& model, std::span<const double> adjoint,
                                std::span<double> grad) {
  if (adjoint.size() != batch_ || grad.size() != model.parameters().size()) {
    throw Error(ErrorCode::ShapeMismatch, "directional batch gradient buffers do not match the model");
  }
  std::fill(grad.begin(), grad.end(), 0.0);

  // Adjoint of the output value is zero; adjoint of its tangent is the input.
  bar_x_.assign(batch_, 0.0);
  bar_x_dot_.assign(adjoint.begin(), adjoint.end());

  for (std::size_t li = model.layers().size(); li-- > 0;) {
    const LayerSpec& l = model.layers()[li];
    auto& buf = buffers_[li];
    const std::size_t in = l.in_dim, w = l.width;

    for (std::size_t k = 0; k < batch_ * w; ++k) {
      buf.bar_z_dot[k] = bar_x_dot_[k] * buf.s1[k];
      buf.bar_z[k] = bar_x_[k] * buf.s1[k] + bar_x_dot_[k] * buf.s2[k] * buf.z_dot[k];
    }

    std::fill(buf.grad_wt.begin(), buf.grad_wt.end(), 0.0);
    kernels_->accumulate_weight_grad(buf.u, buf.bar_z, batch_, in, w, buf.grad_wt);
    kernels_->accumulate_weight_grad(buf.u_dot, buf.bar_z_dot, batch_, in, w, buf.grad_wt);
    auto gw = grad.subspan(l.weight_offset, w * in);
    for (std::size_t o = 0; o < w; ++o)
      for (std::size_t i = 0; i < in; ++i) gw[o * in + i] = buf.grad_wt[i * w + o];
    if (l.has_bias) {
      auto gb = grad.subspan(l.bias_offset, w);
      for (std::size_t b = 0; b < batch_; ++b)
        for (std::size_t o = 0; o < w; ++o) gb[o] += buf.bar_z[b * w + o];
    }

    if (li == 0 || !uses_previous(l.input)) break;

    kernels_->backprop_input(buf.bar_z, buf.weights_t, batch_, in, w, buf.bar_u);
    kernels_->backprop_input(buf.bar_z_dot, buf.weights_t, batch_, in, w, buf.bar_u_dot);
    const std::size_t prev_w = model.layers()[li - 1].width;
    const std::size_t skip = l.input == LayerInput::InvariantsAndPrevious ? 2 : 0;
    bar_x_.resize(batch_ * prev_w);
    bar_x_dot_.resize(batch_ * prev_w);
    for (std::size_t b = 0; b < batch_; ++b)
      for (std::size_t j = 0; j < prev_w; ++j) {
        bar_x_[b * prev_w + j] = buf.bar_u[b * in + skip + j];
        bar_x_dot_[b * prev_w + j] = buf.bar_u_dot[b * in + skip + j];
      }
  }
}

}  // namespace pann
