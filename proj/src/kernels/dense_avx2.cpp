// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "pann/kernels.hpp"

namespace pann::kernels::detail {

void affine_avx2(const AffineArgs& args, std::span<double> output) {
  const std::size_t in = args.in_dim, out = args.out_dim;
  const std::size_t vec_end = out & ~std::size_t{3};
  for (std::size_t b = 0; b < args.batch; ++b) {
    double* row = output.data() + b * out;
    for (std::size_t o = 0; o < out; ++o) row[o] = args.bias.empty() ? 0.0 : args.bias[o];
    const double* x = args.input.data() + b * in;
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = x[i];
      const __m256d xv = _mm256_set1_pd(xi);
      const double* w = args.weights_t.data() + i * out;
      std::size_t o = 0;
      for (; o < vec_end; o += 4) {
        __m256d acc = _mm256_loadu_pd(row + o);
        acc = _mm256_fmadd_pd(xv, _mm256_loadu_pd(w + o), acc);
        _mm256_storeu_pd(row + o, acc);
      }
      for (; o < out; ++o) row[o] += xi * w[o];
    }
  }
}

void backprop_input_avx2(std::span<const double> grad_out, std::span<const double> weights_t, std::size_t batch,
                         std::size_t in_dim, std::size_t out_dim, std::span<double> grad_in) {
  // Four-lane partial sums, reduced pairwise at the end; the summation order
  // differs from the scalar variant.
  const std::size_t vec_end = out_dim & ~std::size_t{3};
  for (std::size_t b = 0; b < batch; ++b) {
    const double* g = grad_out.data() + b * out_dim;
    for (std::size_t i = 0; i < in_dim; ++i) {
      const double* w = weights_t.data() + i * out_dim;
      __m256d acc = _mm256_setzero_pd();
      std::size_t o = 0;
      for (; o < vec_end; o += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(g + o), _mm256_loadu_pd(w + o), acc);
      const __m128d lo = _mm256_castpd256_pd128(acc);
      const __m128d hi = _mm256_extractf128_pd(acc, 1);
      const __m128d pair = _mm_add_pd(lo, hi);
      double s = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
      for (; o < out_dim; ++o) s += g[o] * w[o];
      grad_in[b * in_dim + i] = s;
    }
  }
}

void accumulate_weight_grad_avx2(std::span<const double> input, std::span<const double> grad_out,
                                 std::size_t batch, std::size_t in_dim, std::size_t out_dim,
                                 std::span<double> grad_wt) {
  const std::size_t vec_end = out_dim & ~std::size_t{3};
  for (std::size_t b = 0; b < batch; ++b) {
    const double* x = input.data() + b * in_dim;
    const double* g = grad_out.data() + b * out_dim;
    for (std::size_t i = 0; i < in_dim; ++i) {
      const double xi = x[i];
      const __m256d xv = _mm256_set1_pd(xi);
      double* w = grad_wt.data() + i * out_dim;
      std::size_t o = 0;
      for (; o < vec_end; o += 4) {
        __m256d acc = _mm256_loadu_pd(w + o);
        acc = _mm256_fmadd_pd(xv, _mm256_loadu_pd(g + o), acc);
        _mm256_storeu_pd(w + o, acc);
      }
      for (; o < out_dim; ++o) w[o] += xi * g[o];
    }
  }
}

}  // namespace pann::kernels::detail
