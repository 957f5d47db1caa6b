// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

// aarch64 only; NEON is part of the base ISA there, so no runtime check.

#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace shiftrecycle::kernels::neon {

double dot(const double* x, const double* y, std::size_t n)
{
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
        a1 = vfmaq_f64(a1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n)
{
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void axpby(double a, const double* x, double b, double* y, std::size_t n)
{
    const float64x2_t va = vdupq_n_f64(a);
    const float64x2_t vb = vdupq_n_f64(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vmulq_f64(vb, vld1q_f64(y + i)), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void waxpby(double a, const double* x, double b, const double* y, double* z, std::size_t n)
{
    const float64x2_t va = vdupq_n_f64(a);
    const float64x2_t vb = vdupq_n_f64(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(z + i, vfmaq_f64(vmulq_f64(vb, vld1q_f64(y + i)), va, vld1q_f64(x + i)));
    for (; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void scal(double a, double* x, std::size_t n)
{
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void sqweight(const double* w, const double* x, double* z, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vw = vld1q_f64(w + i);
        vst1q_f64(z + i, vmulq_f64(vmulq_f64(vw, vw), vld1q_f64(x + i)));
    }
    for (; i < n; ++i) z[i] = w[i] * w[i] * x[i];
}

void gemv_t(const double* q, std::size_t ld, std::size_t n, std::size_t p, const double* x, double* out)
{
    for (std::size_t j = 0; j < p; ++j) out[j] = dot(q + j * ld, x, n);
}

void gemv_n(const double* q, std::size_t ld, std::size_t n, std::size_t p, const double* c, double alpha, double* y)
{
    for (std::size_t j = 0; j < p; ++j) axpy(alpha * c[j], q + j * ld, y, n);
}

void band_conv(const double* taps, std::size_t half_width, const double* in, double* out, std::size_t n,
               std::size_t count, std::size_t signal_stride, std::size_t lane_stride)
{
    if (lane_stride != 1) {
        scalar::band_conv(taps, half_width, in, out, n, count, signal_stride, lane_stride);
        return;
    }
    const auto h = static_cast<std::ptrdiff_t>(half_width);
    const auto len = static_cast<std::ptrdiff_t>(n);
    const auto ss = static_cast<std::ptrdiff_t>(signal_stride);
    std::size_t lane = 0;
    for (; lane + 2 <= count; lane += 2) {
        for (std::ptrdiff_t i = 0; i < len; ++i) {
            float64x2_t s = vdupq_n_f64(0.0);
            for (std::ptrdiff_t t = std::max(-h, -i); t <= std::min(h, len - 1 - i); ++t)
                s = vfmaq_n_f64(s, vld1q_f64(in + lane + (i + t) * ss), taps[t + h]);
            vst1q_f64(out + lane + i * ss, s);
        }
    }
    if (lane < count)
        scalar::band_conv(taps, half_width, in + lane, out + lane, n, count - lane, signal_stride, lane_stride);
}

} // namespace shiftrecycle::kernels::neon
