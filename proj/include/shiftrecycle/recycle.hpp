// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Principal and shift-specific recycle spaces for the family (A + γE)x = b.
//
// The principal space Ũ (orthonormal, n_c columns) is anchored at one shift
// γ*: (A + γ*E)·U = K with U = Ũ·R⁻¹. Small shift-independent Gram blocks
// then give the best initial guess over Range(U) for any other shift with
// O(n_c³) work and no N-dimensional products. Local spaces for the correction
// solves are seeded from Ritz vectors of the projected pencil Ũᵀ(A + γE)Ũ.

#include <optional>

#include "shiftrecycle/common.hpp"
#include "shiftrecycle/dense.hpp"
#include "shiftrecycle/minres.hpp"
#include "shiftrecycle/operators.hpp"
#include "shiftrecycle/rminres.hpp"

namespace shiftrecycle {

struct PrincipalSpace {
    Block u_tilde;          // N × n_c, orthonormal
    double anchor_shift = 0.0;
    Block k;                // (A + γ*E)·Ũ·R⁻¹, orthonormal
    dense::Matrix r;        // n_c × n_c upper triangular
    Block au;               // A·Ũ
    Block eu_tilde;         // E·Ũ
    Block eu;               // E·U = E·Ũ·R⁻¹
    dense::Matrix gram_keu;  // Kᵀ(EU)
    dense::Matrix gram_eueu; // (EU)ᵀ(EU)
    Vector vec_ueb;         // UᵀEb = (EU)ᵀb
    Vector ktb;             // Kᵀb
    dense::Matrix a_hat;    // ŨᵀAŨ
    dense::Matrix e_hat;    // ŨᵀEŨ
    // Orthonormal basis of Range([K, EU]) and the matching triangular factor;
    // the stable fallback for ill-conditioned normal equations.
    dense::Matrix stack_r;  // 2n_c × 2n_c
    Vector stack_qtb;       // Q_stackᵀb

    Index size() const { return u_tilde.cols(); }
    /// U·q = Ũ·(R⁻¹q).
    Vector apply_u(const Vector& q) const;
};

/// [x_i1, x_i2, V_i1, V_i2] in that column order.
Block init_principal(const Vector& x_i1, const Vector& x_i2, const RitzBundle& v_i1, const RitzBundle& v_i2);

/// Orthonormal basis of the leading left singular directions with σ₁/σᵢ < cond_cap.
Block stabilize(const Block& raw, double cond_cap = 1e10);

/// Anchors orthonormal Ũ at op's shift. Costs n_c A-matvecs and n_c
/// E-matvecs; every Gram block is formed from the cached A·Ũ and E·Ũ.
PrincipalSpace anchor(const Block& u_tilde, const ShiftedOperator& op_at_anchor, const Vector& b);

/// Re-anchors an existing space at another shift without new matvecs.
PrincipalSpace reanchor(const PrincipalSpace& ps, double shift, const Vector& b);

struct InitialGuess {
    Vector x0;
    Vector r0;              // b − op·x0 from one fresh (A, E) matvec pair
    Vector q;
    bool fallback = false;  // a safeguard path was taken (see warnings)
};

/// Minimizes ‖b − (K + δ·EU)q‖ over q (δ = op.shift() − γ*), i.e. the best
/// guess over Range(U) for op. The n_c×n_c normal equations are solved by
/// Cholesky; when their conditioning estimate exceeds 1e10 the same minimizer
/// is taken from the compact QR of [K, EU] instead.
InitialGuess initial_guess_orth(const PrincipalSpace& ps, const ShiftedOperator& op, const Vector& b,
                                int shift_index = -1);

/// Petrov-Galerkin guess with r0 ⊥ Range(K): (I + δ·KᵀEU)q = Kᵀb. Falls back
/// to the orthogonal guess (with a warning) when the small matrix is singular.
InitialGuess initial_guess_oblique(const PrincipalSpace& ps, const ShiftedOperator& op, const Vector& b,
                                   int shift_index = -1);

/// Ritz vectors of H = Â + γÊ for the `count` smallest eigenvalues, as Ũ·W̃.
/// No N-dimensional matvecs.
Block projected_pencil_ritz(const PrincipalSpace& ps, double shift, Index count);

/// W for one shift group plus A·W and E·W, computed once and reused for every
/// shift in the group. Costs W.cols() pairs of (A, E) matvecs.
struct GroupSeed {
    Block w;
    Block aw;
    Block ew;
};

GroupSeed make_group_seed(const PrincipalSpace& ps, double shift, Index count, const LinearOperator& a,
                          const LinearOperator& e);

struct LocalSpace {
    int shift_index = 0;
    Block u_tilde;          // [W, carried corrections]
    int carried = 0;        // correction vectors appended (0–2)
    RecycleFactor factor;
};

struct LocalSpaceOptions {
    /// |cos θ| above this marks two carried corrections as duplicates.
    double duplicate_cos = 0.999;
    /// Upper bound on Ũℓ's column count.
    Index max_columns = 14;
};

/// Ũℓ = [W, g^(k−1,ℓ), g^(k,ℓ−1)] (missing or zero corrections omitted) and its
/// factor at op's shift. Each appended correction costs one (A, E) pair.
LocalSpace update_local(int shift_index, const GroupSeed& seed, const Vector* g_prev_outer,
                        const Vector* g_prev_shift, const ShiftedOperator& op, const LocalSpaceOptions& opts = {});

/// [V_i1, V_new, x^(k−1,1), …, x^(k−1,M)].
Block update_principal(const RitzBundle& v_i1, const Block& v_new, const std::vector<Vector>& previous_solutions);

struct CorrectionSolve {
    Vector dx;      // estimate of x^(k−1,ℓc) − x^(k,ℓc)
    Block v_new;    // [dx, leading Krylov vectors]
    int iterations = 0;
};

/// (A/γ + E_k)·δx = (E_k − E_{k−1})·x_prev, solved as (A + γE_k)·δx =
/// γ·(E_k − E_{k−1})·x_prev. `weight_change` applies E_k − E_{k−1} and is
/// booked as one E-matvec. MINRES keeps up to `maxit` reorthogonalized Krylov
/// vectors, so the whole call costs at most maxit A-matvecs and maxit + 1
/// E-matvecs.
CorrectionSolve correction_system_solve(const ShiftedOperator& op_at_lc, const LinearOperator& weight_change,
                                        const Vector& x_prev, int maxit = 100, double tol = 1e-6);

} // namespace shiftrecycle
