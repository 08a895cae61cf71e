#include <cstdlib>
#include <string>

#include "pann/error.hpp"
#include "pann/kernels.hpp"

namespace pann::kernels {

namespace {

constexpr KernelSet kScalar{"scalar", &detail::affine_scalar, &detail::backprop_input_scalar,
                            &detail::accumulate_weight_grad_scalar};

#if defined(PANN_HAVE_AVX2_KERNELS)
constexpr KernelSet kAvx2{"avx2", &detail::affine_avx2, &detail::backprop_input_avx2,
                          &detail::accumulate_weight_grad_avx2};
#endif

}  // namespace

bool cpu_supports_avx2_fma() noexcept {
#if defined(PANN_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported;
#else
  return false;
#endif
}

const KernelSet& scalar_kernels() noexcept { return kScalar; }

const KernelSet* avx2_kernels() noexcept {
#if defined(PANN_HAVE_AVX2_KERNELS)
  if (cpu_supports_avx2_fma()) return &kAvx2;
#endif
  return nullptr;
}

KernelChoice parse_kernel_choice(std::string_view name) {
  if (name == "auto") return KernelChoice::Auto;
  if (name == "scalar") return KernelChoice::Scalar;
  if (name == "avx2") return KernelChoice::Avx2;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel variant '" + std::string(name) + "'");
}

const KernelSet& select_kernels(KernelChoice choice) noexcept {
  if (choice == KernelChoice::Auto) {
    if (const char* env = std::getenv("PANN_KERNELS")) {
      const std::string_view v{env};
      if (v == "scalar") choice = KernelChoice::Scalar;
      if (v == "avx2") choice = KernelChoice::Avx2;
    }
  }
  if (choice == KernelChoice::Scalar) return kScalar;
  if (const KernelSet* k = avx2_kernels()) return *k;
  return kScalar;
}

}  // namespace pann::kernels
