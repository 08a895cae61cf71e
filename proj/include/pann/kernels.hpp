#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Batched dense-layer kernels used by the training path.
//
// Layouts (all row-major, contiguous):
//   input      batch x in_dim
//   weights_t  in_dim x out_dim   (transpose of the layer's out x in matrix)
//   output     batch x out_dim
//
// affine and accumulate_weight_grad keep the scalar summation order and differ
// only by FMA contraction; backprop_input uses lane-wise partial sums. Results
// agree to rounding but are not bit-identical across variants, so a given run
// is reproducible only on the same variant.

namespace pann::kernels {

struct AffineArgs {
  std::span<const double> input;
  std::span<const double> weights_t;
  std::span<const double> bias;  // empty: no bias
  std::size_t batch;
  std::size_t in_dim;
  std::size_t out_dim;
};

/// output[b][o] = bias[o] + sum_i input[b][i] * weights_t[i][o]
using AffineFn = void (*)(const AffineArgs&, std::span<double> output);

/// grad_in[b][i] = sum_o grad_out[b][o] * weights_t[i][o]
using BackpropInputFn = void (*)(std::span<const double> grad_out, std::span<const double> weights_t,
                                 std::size_t batch, std::size_t in_dim, std::size_t out_dim,
                                 std::span<double> grad_in);

/// grad_wt[i][o] += sum_b input[b][i] * grad_out[b][o]
using AccumulateWeightGradFn = void (*)(std::span<const double> input, std::span<const double> grad_out,
                                        std::size_t batch, std::size_t in_dim, std::size_t out_dim,
                                        std::span<double> grad_wt);

struct KernelSet {
  std::string_view name;
  AffineFn affine;
  BackpropInputFn backprop_input;
  AccumulateWeightGradFn accumulate_weight_grad;
};

enum class KernelChoice { Auto, Scalar, Avx2 };

const KernelSet& scalar_kernels() noexcept;

/// Null when the binary was built without the AVX2 variants or the CPU lacks AVX2/FMA.
const KernelSet* avx2_kernels() noexcept;

bool cpu_supports_avx2_fma() noexcept;

/// Auto picks AVX2 when available. The PANN_KERNELS environment variable
/// ("scalar" / "avx2") overrides Auto. Asking for Avx2 on a machine without
/// it falls back to scalar.
const KernelSet& select_kernels(KernelChoice choice = KernelChoice::Auto) noexcept;

KernelChoice parse_kernel_choice(std::string_view name);

namespace detail {
void affine_scalar(const AffineArgs& args, std::span<double> output);
void backprop_input_scalar(std::span<const double> grad_out, std::span<const double> weights_t, std::size_t batch,
                           std::size_t in_dim, std::size_t out_dim, std::span<double> grad_in);
void accumulate_weight_grad_scalar(std::span<const double> input, std::span<const double> grad_out,
                                   std::size_t batch, std::size_t in_dim, std::size_t out_dim,
                                   std::span<double> grad_wt);
#if defined(PANN_HAVE_AVX2_KERNELS)
void affine_avx2(const AffineArgs& args, std::span<double> output);
void backprop_input_avx2(std::span<const double> grad_out, std::span<const double> weights_t, std::size_t batch,
                         std::size_t in_dim, std::size_t out_dim, std::span<double> grad_in);
void accumulate_weight_grad_avx2(std::span<const double> input, std::span<const double> grad_out,
                                 std::size_t batch, std::size_t in_dim, std::size_t out_dim,
                                 std::span<double> grad_wt);
#endif
}  // namespace detail

}  // namespace pann::kernels
