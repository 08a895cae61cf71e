#include "pann/kernels.hpp"

namespace pann::kernels::detail {

void affine_scalar(const AffineArgs& args, std::span<double> output) {
  const std::size_t in = args.in_dim, out = args.out_dim;
  for (std::size_t b = 0; b < args.batch; ++b) {
    double* row = output.data() + b * out;
    for (std::size_t o = 0; o < out; ++o) row[o] = args.bias.empty() ? 0.0 : args.bias[o];
    const double* x = args.input.data() + b * in;
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = x[i];
      const double* w = args.weights_t.data() + i * out;
      for (std::size_t o = 0; o < out; ++o) row[o] += xi * w[o];
    }
  }
}

void backprop_input_scalar(std::span<const double> grad_out, std::span<const double> weights_t, std::size_t batch,
                           std::size_t in_dim, std::size_t out_dim, std::span<double> grad_in) {
  for (std::size_t b = 0; b < batch; ++b) {
    const double* g = grad_out.data() + b * out_dim;
    for (std::size_t i = 0; i < in_dim; ++i) {
      const double* w = weights_t.data() + i * out_dim;
      double s = 0.0;
      for (std::size_t o = 0; o < out_dim; ++o) s += g[o] * w[o];
      grad_in[b * in_dim + i] = s;
    }
  }
}

void accumulate_weight_grad_scalar(std::span<const double> input, std::span<const double> grad_out,
                                   std::size_t batch, std::size_t in_dim, std::size_t out_dim,
                                   std::span<double> grad_wt) {
  for (std::size_t b = 0; b < batch; ++b) {
    const double* x = input.data() + b * in_dim;
    const double* g = grad_out.data() + b * out_dim;
    for (std::size_t i = 0; i < in_dim; ++i) {
      const double xi = x[i];
      double* w = grad_wt.data() + i * out_dim;
      for (std::size_t o = 0; o < out_dim; ++o) w[o] += xi * g[o];
    }
  }
}

}  // namespace pann::kernels::detail
