// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>

#include "shiftrecycle/kernels.hpp"

// Per-ISA entry points. Each namespace is compiled in its own translation
// unit with the matching target flags; dispatch.cpp only takes addresses.

#define SHIFTRECYCLE_KERNEL_DECLS                                                                                    \
    double dot(const double* x, const double* y, std::size_t n);                                                     \
    void axpy(double a, const double* x, double* y, std::size_t n);                                                  \
    void axpby(double a, const double* x, double b, double* y, std::size_t n);                                       \
    void waxpby(double a, const double* x, double b, const double* y, double* z, std::size_t n);                     \
    void scal(double a, double* x, std::size_t n);                                                                   \
    void sqweight(const double* w, const double* x, double* z, std::size_t n);                                       \
    void gemv_t(const double* q, std::size_t ld, std::size_t n, std::size_t p, const double* x, double* out);        \
    void gemv_n(const double* q, std::size_t ld, std::size_t n, std::size_t p, const double* c, double alpha,        \
                double* y);                                                                                          \
    void band_conv(const double* taps, std::size_t half_width, const double* in, double* out, std::size_t n,         \
                   std::size_t count, std::size_t signal_stride, std::size_t lane_stride);

namespace shiftrecycle::kernels::scalar {
SHIFTRECYCLE_KERNEL_DECLS
}

#if defined(SHIFTRECYCLE_HAVE_AVX2)
namespace shiftrecycle::kernels::avx2 {
SHIFTRECYCLE_KERNEL_DECLS
}
#endif

#if defined(SHIFTRECYCLE_HAVE_NEON)
namespace shiftrecycle::kernels::neon {
SHIFTRECYCLE_KERNEL_DECLS
}
#endif
