#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pann/kernels.hpp"
#include "pann/kinematics.hpp"

namespace pann {

enum class Activation { Tanh, Softplus, Linear };
enum class WeightConstraint { Free, NonNegative };

/// Network families for the potential psi(I1bar, I2bar; t).
///
///   ConvexMonotonic   t -> Tanh(n);  (I1bar-3, I2bar-3, x1) -> Softplus(n) -> linear
///   Monotonic         (I1bar-3, I2bar-3, t) -> Tanh(n) -> Softplus(n) -> linear
///   Unrestricted1HL   (I1bar-3, I2bar-3, t) -> Tanh(n) -> linear
///   Unrestricted2HL   (I1bar-3, I2bar-3, t) -> Tanh(n) -> Softplus(n) -> linear
///
/// Weights of ConvexMonotonic and Monotonic are non-negative; biases are free.
/// The linear output layer has no bias.
enum class Architecture { ConvexMonotonic, Monotonic, Unrestricted1HL, Unrestricted2HL };

/// What a layer consumes, concatenated in this order.
enum class LayerInput {
  InvariantsAndParams,    // (I1bar-3, I2bar-3, t)
  Params,                 // t
  InvariantsAndPrevious,  // (I1bar-3, I2bar-3, x_prev)
  Previous,               // x_prev
};

struct LayerSpec {
  std::size_t in_dim = 0;
  std::size_t width = 0;
  Activation activation = Activation::Linear;
  WeightConstraint weight_constraint = WeightConstraint::Free;
  LayerInput input = LayerInput::Previous;
  bool has_bias = true;
  std::size_t weight_offset = 0;  // width x in_dim, row-major
  std::size_t bias_offset = 0;    // width entries, valid when has_bias
};

std::string_view to_string(Architecture arch) noexcept;
std::string_view to_string(Activation act) noexcept;
std::string_view to_string(WeightConstraint c) noexcept;
Architecture parse_architecture(std::string_view name);
Activation parse_activation(std::string_view name);
WeightConstraint parse_weight_constraint(std::string_view name);

/// n^2 + n(m+5) for the two-hidden-layer families, n(m+4) for Unrestricted1HL.
std::size_t parameter_count(Architecture arch, std::size_t n, std::size_t m);

/// Layer layout for an architecture; offsets index the flat parameter vector.
std::vector<LayerSpec> layer_layout(Architecture arch, std::size_t n, std::size_t m);

/// A network potential with all parameters stored in one flat vector.
class PotentialModel {
 public:
  PotentialModel() = default;

  /// All parameters zero.
  PotentialModel(Architecture arch, std::size_t n, std::size_t m);

  [[nodiscard]] Architecture architecture() const noexcept { return arch_; }
  [[nodiscard]] std::size_t nodes() const noexcept { return n_; }
  [[nodiscard]] std::size_t param_dim() const noexcept { return m_; }
  [[nodiscard]] std::size_t input_dim() const noexcept { return 2 + m_; }
  [[nodiscard]] const std::vector<LayerSpec>& layers() const noexcept { return layers_; }

  [[nodiscard]] std::span<const double> parameters() const noexcept { return params_; }
  [[nodiscard]] std::span<double> parameters() noexcept { return params_; }

  [[nodiscard]] std::span<const double> weights(std::size_t layer) const;
  [[nodiscard]] std::span<double> weights(std::size_t layer);
  [[nodiscard]] std::span<const double> bias(std::size_t layer) const;
  [[nodiscard]] std::span<double> bias(std::size_t layer);

  /// One flag per parameter: 1 where the entry is a sign-constrained weight.
  [[nodiscard]] const std::vector<std::uint8_t>& constraint_mask() const noexcept { return mask_; }

  /// Clamp every constrained weight to max(w, 0).
  void project() noexcept;

  /// True when no constrained weight is negative.
  [[nodiscard]] bool satisfies_constraints() const noexcept;

  /// Free-form record attached on calibration; serialized verbatim.
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

 private:
  Architecture arch_ = Architecture::Monotonic;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<LayerSpec> layers_;
  std::vector<double> params_;
  std::vector<std::uint8_t> mask_;
};

/// Glorot-uniform weights (absolute value for constrained layers); biases uniform
/// on a hundredth of the same limit.
void initialize_glorot(PotentialModel& model, std::mt19937_64& rng);

struct Matrix2 {
  std::array<double, 4> a{};
  double& operator()(std::size_t i, std::size_t j) noexcept { return a[2 * i + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a[2 * i + j]; }
};

double min_eigenvalue(const Matrix2& m) noexcept;

struct PotentialDerivatives {
  double value = 0.0;
  std::array<double, 2> d_invariants{};  // d psi / d I1bar, d psi / d I2bar
  std::vector<double> d_params;          // d psi / d t
  Matrix2 hessian;                       // d^2 psi / d I d I
};

enum class DerivativeOrder { Value, First, Second };

/// Value and analytic input derivatives by layer-wise forward-mode chain rule.
PotentialDerivatives evaluate_potential(const PotentialModel& model, const InvariantState& state,
                                        DerivativeOrder order = DerivativeOrder::Second);

double forward(const PotentialModel& model, const InvariantState& state);
std::array<double, 2> grad_invariants(const PotentialModel& model, const InvariantState& state);
std::vector<double> grad_params(const PotentialModel& model, const InvariantState& state);
Matrix2 hessian_invariants(const PotentialModel& model, const InvariantState& state);

struct SparsityCount {
  std::size_t nonzero = 0;
  std::size_t total = 0;
};

inline constexpr double kSparsityThreshold = 1e-8;

SparsityCount sparsity(const PotentialModel& model);

/// Batched directional input-derivative of the potential and its parameter
/// gradient, evaluated with the dense-layer kernels.
///
/// For each sample b with network input x_b = (I1bar-3, I2bar-3, t) and
/// direction d_b, forward() computes grad_x psi(x_b) . d_b. backward() then
/// accumulates sum_b adjoint_b * d(grad_x psi(x_b) . d_b)/d(theta) into a
/// gradient laid out like PotentialModel::parameters().
class DirectionalBatch {
 public:
  DirectionalBatch(const PotentialModel& shape, std::size_t batch,
                   const kernels::KernelSet& kernels = kernels::select_kernels());

  void forward(const PotentialModel& model, std::span<const double> inputs, std::span<const double> directions,
               std::span<double> out);

  void backward(const PotentialModel& model, std::span<const double> adjoint, std::span<double> grad);

  [[nodiscard]] std::size_t batch() const noexcept { return batch_; }
  [[nodiscard]] const kernels::KernelSet& kernels() const noexcept { return *kernels_; }

 private:
  struct LayerBuffers {
    std::vector<double> weights_t;  // in x out
    std::vector<double> u, u_dot;   // batch x in
    std::vector<double> z, z_dot;   // batch x out
    std::vector<double> x, x_dot;   // batch x out
    std::vector<double> s1, s2;     // activation first / second derivative at z
    std::vector<double> grad_wt;    // in x out
    std::vector<double> bar_z, bar_z_dot, bar_u, bar_u_dot;
  };

  const kernels::KernelSet* kernels_;
  std::size_t batch_;
  std::size_t input_dim_;
  std::vector<LayerBuffers> buffers_;
  std::vector<double> bar_x_, bar_x_dot_;
};

}  // namespace pann
