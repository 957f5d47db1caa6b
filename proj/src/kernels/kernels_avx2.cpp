// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

// Built with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace shiftrecycle::kernels::avx2 {

namespace {

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

double dot(const double* x, const double* y, std::size_t n)
{
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
        a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
        a2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), a2);
        a3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), a3);
    }
    for (; i + 4 <= n; i += 4) a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    double s = hsum(_mm256_add_pd(_mm256_add_pd(a0, a1), _mm256_add_pd(a2, a3)));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n)
{
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void axpby(double a, const double* x, double b, double* y, std::size_t n)
{
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_mul_pd(vb, _mm256_loadu_pd(y + i))));
    for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void waxpby(double a, const double* x, double b, const double* y, double* z, std::size_t n)
{
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(z + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_mul_pd(vb, _mm256_loadu_pd(y + i))));
    for (; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void scal(double a, double* x, std::size_t n)
{
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void sqweight(const double* w, const double* x, double* z, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vw = _mm256_loadu_pd(w + i);
        _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_mul_pd(vw, vw), _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) z[i] = w[i] * w[i] * x[i];
}

void gemv_t(const double* q, std::size_t ld, std::size_t n, std::size_t p, const double* x, double* out)
{
    std::size_t j = 0;
    // Four columns per sweep so each x load feeds four FMAs.
    for (; j + 4 <= p; j += 4) {
        const double* c0 = q + j * ld;
        const double* c1 = c0 + ld;
        const double* c2 = c1 + ld;
        const double* c3 = c2 + ld;
        __m256d s0 = _mm256_setzero_pd();
        __m256d s1 = _mm256_setzero_pd();
        __m256d s2 = _mm256_setzero_pd();
        __m256d s3 = _mm256_setzero_pd();
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            const __m256d vx = _mm256_loadu_pd(x + i);
            s0 = _mm256_fmadd_pd(_mm256_loadu_pd(c0 + i), vx, s0);
            s1 = _mm256_fmadd_pd(_mm256_loadu_pd(c1 + i), vx, s1);
            s2 = _mm256_fmadd_pd(_mm256_loadu_pd(c2 + i), vx, s2);
            s3 = _mm256_fmadd_pd(_mm256_loadu_pd(c3 + i), vx, s3);
        }
        double r0 = hsum(s0), r1 = hsum(s1), r2 = hsum(s2), r3 = hsum(s3);
        for (; i < n; ++i) {
            r0 += c0[i] * x[i];
            r1 += c1[i] * x[i];
            r2 += c2[i] * x[i];
            r3 += c3[i] * x[i];
        }
        out[j] = r0;
        out[j + 1] = r1;
        out[j + 2] = r2;
        out[j + 3] = r3;
    }
    for (; j < p; ++j) out[j] = dot(q + j * ld, x, n);
}

void gemv_n(const double* q, std::size_t ld, std::size_t n, std::size_t p, const double* c, double alpha, double* y)
{
    std::size_t j = 0;
    for (; j + 4 <= p; j += 4) {
        const double* c0 = q + j * ld;
        const double* c1 = c0 + ld;
        const double* c2 = c1 + ld;
        const double* c3 = c2 + ld;
        const double k0 = alpha * c[j], k1 = alpha * c[j + 1], k2 = alpha * c[j + 2], k3 = alpha * c[j + 3];
        const __m256d v0 = _mm256_set1_pd(k0);
        const __m256d v1 = _mm256_set1_pd(k1);
        const __m256d v2 = _mm256_set1_pd(k2);
        const __m256d v3 = _mm256_set1_pd(k3);
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            __m256d acc = _mm256_loadu_pd(y + i);
            acc = _mm256_fmadd_pd(v0, _mm256_loadu_pd(c0 + i), acc);
            acc = _mm256_fmadd_pd(v1, _mm256_loadu_pd(c1 + i), acc);
            acc = _mm256_fmadd_pd(v2, _mm256_loadu_pd(c2 + i), acc);
            acc = _mm256_fmadd_pd(v3, _mm256_loadu_pd(c3 + i), acc);
            _mm256_storeu_pd(y + i, acc);
        }
        for (; i < n; ++i) y[i] += k0 * c0[i] + k1 * c1[i] + k2 * c2[i] + k3 * c3[i];
    }
    for (; j < p; ++j) axpy(alpha * c[j], q + j * ld, y, n);
}

void band_conv(const double* taps, std::size_t half_width, const double* in, double* out, std::size_t n,
               std::size_t count, std::size_t signal_stride, std::size_t lane_stride)
{
    const auto h = static_cast<std::ptrdiff_t>(half_width);
    const auto len = static_cast<std::ptrdiff_t>(n);
    const auto ss = static_cast<std::ptrdiff_t>(signal_stride);

    if (lane_stride == 1) {
        // Adjacent lanes are contiguous: vectorize across four lanes at once.
        std::size_t lane = 0;
        for (; lane + 4 <= count; lane += 4) {
            for (std::ptrdiff_t i = 0; i < len; ++i) {
                const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-h, -i);
                const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(h, len - 1 - i);
                __m256d s = _mm256_setzero_pd();
                for (std::ptrdiff_t t = lo; t <= hi; ++t)
                    s = _mm256_fmadd_pd(_mm256_set1_pd(taps[t + h]), _mm256_loadu_pd(in + lane + (i + t) * ss), s);
                _mm256_storeu_pd(out + lane + i * ss, s);
            }
        }
        if (lane < count)
            scalar::band_conv(taps, half_width, in + lane, out + lane, n, count - lane, signal_stride, lane_stride);
        return;
    }
    if (signal_stride == 1) {
        // Contiguous signals: interior points take four outputs per step.
        for (std::size_t lane = 0; lane < count; ++lane) {
            const double* src = in + lane * lane_stride;
            double* dst = out + lane * lane_stride;
            std::ptrdiff_t i = 0;
            for (; i < std::min(h, len); ++i) {
                double s = 0.0;
                for (std::ptrdiff_t t = -i; t <= std::min(h, len - 1 - i); ++t) s += taps[t + h] * src[i + t];
                dst[i] = s;
            }
            for (; i + 4 + h <= len; i += 4) {
                __m256d s = _mm256_setzero_pd();
                for (std::ptrdiff_t t = -h; t <= h; ++t)
                    s = _mm256_fmadd_pd(_mm256_set1_pd(taps[t + h]), _mm256_loadu_pd(src + i + t), s);
                _mm256_storeu_pd(dst + i, s);
            }
            for (; i < len; ++i) {
                double s = 0.0;
                for (std::ptrdiff_t t = std::max(-h, -i); t <= std::min(h, len - 1 - i); ++t) s += taps[t + h] * src[i + t];
                dst[i] = s;
            }
        }
        return;
    }
    scalar::band_conv(taps, half_width, in, out, n, count, signal_stride, lane_stride);
}

} // namespace shiftrecycle::kernels::avx2
