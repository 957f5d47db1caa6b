// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Thin Eigen-facing wrappers over the dispatched kernels.

#include <cmath>

#include "shiftrecycle/common.hpp"
#include "shiftrecycle/kernels.hpp"

namespace shiftrecycle::blas {

inline double dot(const Vector& x, const Vector& y)
{
    return kernels::active().dot(x.data(), y.data(), static_cast<std::size_t>(x.size()));
}

inline double nrm2(const Vector& x) { return std::sqrt(dot(x, x)); }

inline void axpy(double a, const Vector& x, Vector& y)
{
    kernels::active().axpy(a, x.data(), y.data(), static_cast<std::size_t>(x.size()));
}

inline void scal(double a, Vector& x) { kernels::active().scal(a, x.data(), static_cast<std::size_t>(x.size())); }

/// z = a*x + b*y
inline void waxpby(double a, const Vector& x, double b, const Vector& y, Vector& z)
{
    z.resize(x.size());
    kernels::active().waxpby(a, x.data(), b, y.data(), z.data(), static_cast<std::size_t>(x.size()));
}

/// Qᵀx for a column block Q.
inline Vector gemv_t(const Block& q, const Vector& x)
{
    Vector out(q.cols());
    if (q.cols() > 0)
        kernels::active().gemv_t(q.data(), static_cast<std::size_t>(q.rows()), static_cast<std::size_t>(q.rows()),
                                 static_cast<std::size_t>(q.cols()), x.data(), out.data());
    return out;
}

/// y += alpha * Q c
inline void gemv_n(const Block& q, const Vector& c, double alpha, Vector& y)
{
    if (q.cols() > 0)
        kernels::active().gemv_n(q.data(), static_cast<std::size_t>(q.rows()), static_cast<std::size_t>(q.rows()),
                                 static_cast<std::size_t>(q.cols()), c.data(), alpha, y.data());
}

} // namespace shiftrecycle::blas
