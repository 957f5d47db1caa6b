// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// The outer edge-preserving iteration. Each outer step k solves
// (A + γℓE_k)x = b for all M shifts with recycling, picks λ by the L-curve,
// and reweights the regularizer: E_k = Lᵀ D_k² L.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "shiftrecycle/common.hpp"
#include "shiftrecycle/config.hpp"
#include "shiftrecycle/lcurve.hpp"
#include "shiftrecycle/problems.hpp"
#include "shiftrecycle/recycle.hpp"

namespace shiftrecycle {

/// d_new = (1 − w^p) ∘ d with w = |d ∘ Lx*| / ‖d ∘ Lx*‖_∞. A zero gradient
/// leaves d unchanged (with a warning) and clears `changed`.
Vector update_weights(const Vector& weights, const Vector& l_x, double p, bool* changed = nullptr);

/// One row of report.csv; ell is 1-based.
struct SystemRecord {
    int k = 0;
    int ell = 0;
    double lambda = 0.0;
    std::uint64_t matvecs_a = 0;
    std::uint64_t matvecs_e = 0;
    std::uint64_t baseline_a = 0;
    std::uint64_t baseline_e = 0;
    double relres = 0.0;           // true relative residual of the accepted x
    double baseline_relres = 0.0;
    int iters = 0;                 // Krylov iterations spent on this system
    int baseline_iters = 0;
    double guess_relres = 1.0;     // relative residual of the initial guess
    bool converged = false;
};

struct OuterRecord {
    int k = 0;
    Index corner = -1;             // 0-based
    Index baseline_corner = -1;
    std::vector<LCurvePoint> lcurve;
    std::vector<LCurvePoint> baseline_lcurve;
    std::vector<double> curvature;
    Vector x_star;
    Index principal_size = 0;      // n_c after stabilization
    std::uint64_t anchor_a = 0;
    std::uint64_t anchor_e = 0;
    std::uint64_t correction_a = 0;
    std::uint64_t correction_e = 0;
    int correction_iters = 0;
};

struct RunReport {
    std::vector<SystemRecord> rows;
    std::vector<OuterRecord> outer;
    std::vector<double> lambda_history;
    int outer_iterations = 0;
    bool stopped_by_rule = false;
    bool maxits_reached = false;
    /// (k, ℓ) pairs (ℓ 1-based) whose accepted residual exceeded tol.
    std::vector<std::pair<int, int>> unconverged;
    Vector weights;                      // d after the last update
    std::vector<Vector> last_solutions;  // x^(K,ℓ)
    std::vector<Vector> last_baseline;   // baseline x^(K,ℓ), when enabled
    double wall_seconds = 0.0;
};

struct RunHooks {
    CornerFinder corner_finder;          // default: max_curvature_corner
    /// Keeps E fixed across outer iterations (weights are never updated).
    bool freeze_weights = false;
    std::function<void(const OuterRecord&)> on_outer;
    /// Called after anchoring with k, the principal space, A, E_k and b.
    std::function<void(int, const PrincipalSpace&, const LinearOperator&, const LinearOperator&, const Vector&)> on_principal;
};

/// Runs the outer loop. Throws DegenerateLCurve when no corner exists.
RunReport run_outer(const problems::ProblemSpec& problem, const RunConfig& cfg, const RunHooks& hooks = {});

/// b = Cᵀd.
Vector normal_rhs(const problems::ProblemSpec& problem);

} // namespace shiftrecycle
