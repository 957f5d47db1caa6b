// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "shiftrecycle/common.hpp"
#include "shiftrecycle/dense.hpp"
#include "shiftrecycle/operators.hpp"

namespace shiftrecycle {

/// Symmetric map used by the Krylov solvers. Each call must book its own
/// matvec cost; the solvers never count on their own.
struct SymmetricMap {
    Index dim;
    std::function<void(const Vector&, Vector&)> apply;
};

SymmetricMap as_map(const LinearOperator& op);
SymmetricMap as_map(const ShiftedOperator& op);

/// Lanczos quantities from a MINRES run: op·V_m = V_{m+1}·T̲_m on the stored
/// prefix of V.
struct LanczosState {
    Block basis;                // N × stored, orthonormal
    std::vector<double> alpha;  // diag(T), one per iteration
    std::vector<double> beta;   // subdiagonal; beta[j] = T(j+1, j)
    Index iterations = 0;
    double xi = 0.0;            // ‖r₀‖₂

    /// (m+1)×m tridiagonal T̲_m.
    dense::Matrix tridiagonal() const;
};

struct RitzBundle {
    Block vectors;              // N × K
    Vector values;              // ascending
    Vector residuals;           // ‖op·w − θ·w‖₂ per pair
};

struct MinresOptions {
    double tol = 1e-6;
    int maxit = 1000;
    /// Leading Lanczos vectors kept (and fully reorthogonalized).
    int store_cap = 0;
};

struct MinresResult {
    Vector x;
    /// relres[0] is the initial residual; one entry per iteration after that.
    /// Denominator is ‖b‖₂ (1 when b = 0).
    std::vector<double> relres;
    LanczosState lanczos;
    int iterations = 0;
    bool converged = false;
    /// Lanczos β hit zero: the Krylov space is invariant and x is exact.
    bool breakdown = false;
};

/// MINRES from x0. Costs iterations + 1 applications of op (one for b − op·x0).
MinresResult minres_solve(const SymmetricMap& op, const Vector& b, const Vector& x0, const MinresOptions& opts);
/// MINRES from a zero start: no initial matvec, so the cost is the iteration count.
MinresResult minres_solve(const SymmetricMap& op, const Vector& b, const MinresOptions& opts);

template <class Op>
MinresResult minres_solve(const Op& op, const Vector& b, const Vector& x0, const MinresOptions& opts)
{
    return minres_solve(as_map(op), b, x0, opts);
}
template <class Op>
MinresResult minres_solve(const Op& op, const Vector& b, const MinresOptions& opts)
{
    return minres_solve(as_map(op), b, opts);
}

/// Ritz pairs of the projected operator Vᵀ·op·V over the stored Lanczos basis,
/// smallest values first. Costs one op application per stored vector.
RitzBundle extract_ritz(const LanczosState& state, const SymmetricMap& op, Index count);

template <class Op>
RitzBundle extract_ritz(const LanczosState& state, const Op& op, Index count)
{
    return extract_ritz(state, as_map(op), count);
}

namespace detail {

/// Incremental QR of the Lanczos tridiagonal by Givens rotations, plus the
/// MINRES direction recurrence. Directions live in the N-dimensional space
/// and, optionally, in a p-dimensional companion space that tracks a linear
/// image of each Lanczos vector (used by recycling MINRES for Kᵀ·op·V_m).
class MinresRecurrence {
public:
    MinresRecurrence(Index n, Index companion, double beta1);

    /// Feeds column j of T̲ (beta_j couples v_{j-1}, v_j; beta_next = β_{j+1})
    /// and the current Lanczos vector v_j (with its companion image).
    /// Returns the updated residual norm |φ̄|.
    double step(double beta_j, double alpha_j, double beta_next, const Vector& v, const Vector* companion);

    const Vector& x() const { return x_; }
    const Vector& companion_x() const { return cx_; }
    double residual() const { return std::abs(phibar_); }

private:
    double c1_ = 1.0, s1_ = 0.0; // rotation j-1
    double c2_ = 1.0, s2_ = 0.0; // rotation j-2
    double phibar_;
    Vector d1_, d2_;             // directions j-1, j-2
    Vector cd1_, cd2_;
    Vector x_, cx_;
};

} // namespace detail

} // namespace shiftrecycle
