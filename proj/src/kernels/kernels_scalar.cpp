// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "kernels_impl.hpp"

namespace shiftrecycle::kernels::scalar {

double dot(const double* x, const double* y, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby(double a, const double* x, double b, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void waxpby(double a, const double* x, double b, const double* y, double* z, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void scal(double a, double* x, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void sqweight(const double* w, const double* x, double* z, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) z[i] = w[i] * w[i] * x[i];
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
    const auto h = static_cast<std::ptrdiff_t>(half_width);
    const auto len = static_cast<std::ptrdiff_t>(n);
    for (std::size_t lane = 0; lane < count; ++lane) {
        const double* src = in + lane * lane_stride;
        double* dst = out + lane * lane_stride;
        for (std::ptrdiff_t i = 0; i < len; ++i) {
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-h, -i);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(h, len - 1 - i);
            double s = 0.0;
            for (std::ptrdiff_t t = lo; t <= hi; ++t) s += taps[t + h] * src[(i + t) * static_cast<std::ptrdiff_t>(signal_stride)];
            dst[i * static_cast<std::ptrdiff_t>(signal_stride)] = s;
        }
    }
}

} // namespace shiftrecycle::kernels::scalar
