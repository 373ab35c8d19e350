#include "bai/kernels.hpp"

#include <string>

#include "bai/errors.hpp"
#include "kernel_tables.hpp"

namespace bai::kernels {

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(BAI_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) {
    throw UsageError("kernel ISA '" + std::string(name(isa)) + "' is not available on this host");
  }
#if defined(BAI_HAVE_AVX2_KERNELS)
  if (isa == Isa::avx2) return detail::avx2_table;
#endif
  return detail::scalar_table;
}

const KernelTable& active() {
  static const KernelTable& chosen = supported(Isa::avx2) ? table(Isa::avx2) : table(Isa::scalar);
  return chosen;
}

void normal_cdf(std::span<const double> x, std::span<double> out) {
  if (out.size() < x.size()) throw UsageError("normal_cdf: output span too small");
  active().normal_cdf(x.data(), out.data(), x.size());
}

std::size_t count_arm1(std::span<const double> x1, std::span<const double> x0,
                       double sigma1, double sigma0, double c) {
  if (x1.size() != x0.size()) throw UsageError("count_arm1: span sizes differ");
  return active().count_arm1(x1.data(), x0.data(), x1.size(), sigma1, sigma0, c);
}

}  // namespace bai::kernels
