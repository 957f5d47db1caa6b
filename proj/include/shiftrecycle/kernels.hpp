// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Level-1/level-2 vector kernels used by every Krylov inner loop.
//
// Each kernel has a portable scalar reference and, where the target allows,
// an AVX2+FMA (x86-64) or NEON (aarch64) variant. The variant is chosen once
// at first use from the running CPU; SHIFTRECYCLE_SIMD=scalar|avx2|neon
// overrides the choice. All variants agree to rounding (see test_kernels).

#include <cstddef>
#include <span>
#include <string_view>

namespace shiftrecycle::kernels {

enum class Backend { Scalar, Avx2, Neon };

struct Table {
    Backend backend;
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a*x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // y = a*x + b*y
    void (*axpby)(double a, const double* x, double b, double* y, std::size_t n);
    // z = a*x + b*y
    void (*waxpby)(double a, const double* x, double b, const double* y, double* z, std::size_t n);
    void (*scal)(double a, double* x, std::size_t n);
    // z = w .* w .* x   (weighted-Laplacian middle factor)
    void (*sqweight)(const double* w, const double* x, double* z, std::size_t n);
    // out[j] = Q(:,j)·x for column-major Q (n rows, p cols, leading dim ld)
    void (*gemv_t)(const double* q, std::size_t ld, std::size_t n, std::size_t p, const double* x, double* out);
    // y += alpha * Q c
    void (*gemv_n)(const double* q, std::size_t ld, std::size_t n, std::size_t p, const double* c, double alpha,
                   double* y);
    // out[i] = sum_{|t|<=h} taps[t+h] * in[i+t] on a zero-padded signal of length n.
    // Strided access lets the same kernel run along rows and columns of an image.
    void (*band_conv)(const double* taps, std::size_t half_width, const double* in, double* out, std::size_t n,
                      std::size_t count, std::size_t signal_stride, std::size_t lane_stride);
};

const Table& scalar_table();
// nullptr when the variant is not compiled in or the CPU lacks the feature.
const Table* avx2_table();
const Table* neon_table();

const Table& active();
void select(Backend backend);
std::string_view name(Backend backend);

inline double dot(std::span<const double> x, std::span<const double> y) { return active().dot(x.data(), y.data(), x.size()); }
inline void axpy(double a, std::span<const double> x, std::span<double> y) { active().axpy(a, x.data(), y.data(), x.size()); }

} // namespace shiftrecycle::kernels
