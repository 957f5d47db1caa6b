// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Small dense factorizations on n_c-sized matrices and tall-skinny N×p blocks.

#include <optional>

#include "shiftrecycle/common.hpp"

namespace shiftrecycle::dense {

using Matrix = Eigen::MatrixXd;

/// Economy QR with nonnegative diag(R).
struct TallSkinnyFactor {
    Block q;
    Matrix r;
    /// min|R_ii| / max|R_jj| < 1e-14.
    bool rank_deficient = false;
};

inline constexpr double kRankTol = 1e-14;

TallSkinnyFactor economy_qr(const Block& m);

/// Leading left singular vectors of m with σ₁/σᵢ < cond_cap.
Block truncated_orthonormal_basis(const Block& m, double cond_cap = 1e10);

struct SymEig {
    Vector values;  // ascending
    Matrix vectors; // orthonormal columns
};

/// Symmetrizes (H + Hᵀ)/2 before solving.
SymEig sym_eig(const Matrix& h);

/// Cholesky solve. Throws NotPositiveDefinite carrying `tag` (the shift index
/// that produced G, or -1) on a non-positive pivot.
class NotPositiveDefinite : public Error {
public:
    NotPositiveDefinite(const std::string& what, int tag) : Error(what), tag_(tag) {}
    int tag() const { return tag_; }

private:
    int tag_;
};

Vector spd_solve(const Matrix& g, const Vector& rhs, int tag = -1);

struct LeastSquares {
    Vector x;
    bool rank_deficient = false;
};

/// argmin ‖rhs − M w‖₂ by Householder QR of M.
LeastSquares lstsq(const Matrix& m, const Vector& rhs);

/// Solves R x = b for upper-triangular R.
Vector solve_upper(const Matrix& r, const Vector& b);

} // namespace shiftrecycle::dense
