#pragma once

#include "bai/kernel_types.hpp"

namespace bai::kernels::detail {

extern const KernelTable scalar_table;
#if defined(BAI_HAVE_AVX2_KERNELS)
extern const KernelTable avx2_table;
#endif

}  // namespace bai::kernels::detail
