#pragma once

#include "glossrank/kernels.hpp"

namespace glossrank::kernels::detail {

#if defined(GLOSSRANK_HAVE_AVX2)
// Defined in avx2.cpp, the only translation unit built with -mavx2 -mfma.
const KernelTable& avx2_table_impl() noexcept;
#endif

}  // namespace glossrank::kernels::detail
