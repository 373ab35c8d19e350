#pragma once

// Data-parallel inner loops with a scalar reference implementation and
// vector variants chosen at runtime from the host CPU's capabilities.
//
// Every variant must agree with the scalar table: bit-for-bit for
// euler_step and count_arm1 (only correctly rounded +,-,*,/,sqrt are used,
// in the same order), and to within a few ulps for normal_cdf and the
// accumulate_* reductions (vector exp and lane-wise summation order).

#include <cstddef>
#include <span>
#include <string_view>

#include "bai/kernel_types.hpp"

namespace bai::kernels {

std::string_view name(Isa isa);

bool supported(Isa isa);

// Throws UsageError if the ISA is not available on this host.
const KernelTable& table(Isa isa);

// Best table supported by the host; fixed for the process lifetime.
const KernelTable& active();

// Span conveniences over active().
void normal_cdf(std::span<const double> x, std::span<double> out);

std::size_t count_arm1(std::span<const double> x1, std::span<const double> x0,
                       double sigma1, double sigma0, double c);

}  // namespace bai::kernels
