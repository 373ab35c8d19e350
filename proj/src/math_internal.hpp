#pragma once

namespace bai::detail {

// Phi(x) without the finiteness check; used by the kernel tables.
double normal_cdf_unchecked(double x);

}  // namespace bai::detail
