// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "shiftrecycle/common.hpp"
#include "shiftrecycle/dense.hpp"
#include "shiftrecycle/minres.hpp"
#include "shiftrecycle/operators.hpp"

namespace shiftrecycle {

/// op·Ũ = K·R with K orthonormal. U = Ũ·R⁻¹ is only ever applied, never formed.
struct RecycleFactor {
    Block u_tilde; // N × p
    dense::Matrix r; // p × p upper triangular
    Block k;       // N × p, orthonormal

    Index size() const { return k.cols(); }
    /// U·z = Ũ·(R⁻¹z).
    Vector apply_u(const Vector& z) const;
    static RecycleFactor empty(Index n);
};

/// Builds the factor from op·Ũ. Costs Ũ.cols() applications of op.
RecycleFactor build_recycle_factor(const ShiftedOperator& op, const Block& u_tilde);

/// Same, from a precomputed image op·Ũ (no matvecs). Numerically dependent
/// image columns are dropped: Ũ is replaced by Ũ·W over the right singular
/// vectors W with σ₁/σᵢ < 1e10, and a warning is issued.
RecycleFactor recycle_factor_from_image(const Block& u_tilde, const Block& image);

struct RminresOptions {
    /// Absolute target on ‖rhs − op·g‖₂.
    double target = 0.0;
    int maxit = 1000;
    /// Normalizes the residual history (typically ‖b‖ of the outer system).
    double ref_norm = 1.0;
    /// Test hooks: keep V_m, the Lanczos coefficients and Kᵀ·op·V_m.
    bool record = false;
};

struct RminresResult {
    Vector g;
    /// relres[0] = ξ/ref_norm, then one entry per iteration.
    std::vector<double> relres;
    int iterations = 0;
    bool converged = false;
    double xi = 0.0;

    // Populated when RminresOptions::record is set.
    Block basis;                 // V_m
    std::vector<double> alpha;
    std::vector<double> beta;
    dense::Matrix projection;    // Kᵀ·op·V_m (p × m)
    Vector ktr;                  // Kᵀ·rhs
};

/// Recycling MINRES for op·g = rhs over Range([U, V_m]), where V_m spans the
/// Krylov space of (I − KKᵀ)·op from (I − KKᵀ)·rhs. Costs one op
/// application per iteration.
RminresResult rminres_solve(const ShiftedOperator& op, const Vector& rhs, const RecycleFactor& rf,
                            const RminresOptions& opts);

} // namespace shiftrecycle
