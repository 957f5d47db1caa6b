// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Dense brute-force references for tests and acceptance runs only. Nothing in
// the library or the CLI links against this target.

#include <cstdint>

#include "shiftrecycle/common.hpp"
#include "shiftrecycle/dense.hpp"
#include "shiftrecycle/operators.hpp"

namespace shiftrecycle::oracle {

using dense::Matrix;

/// Materializes op by applying it to unit vectors (uncounted).
Matrix to_dense(const LinearOperator& op);
/// Wraps a dense matrix as a LinearOperator (symmetric when square and flagged).
LinearOperator from_dense(const Matrix& m, bool symmetric);

/// Direct solve of (A + γE)x = b by Cholesky; throws on singularity.
Vector dense_solve(const Matrix& a, const Matrix& e, double shift, const Vector& b);

/// EV = AVM, VᵀAV = I, μ descending, d̃ = Vᵀb.
struct GeneralizedSpectrum {
    Matrix v;
    Vector mu;
    Vector dtilde;
};

GeneralizedSpectrum generalized_spectrum(const Matrix& a, const Matrix& e, const Vector& b);

/// x_γ = Σ_j v_j d̃_j / (1 + γμ_j).
Vector solution_via_spectrum(const GeneralizedSpectrum& spec, double shift);

/// x_{γa} − x_{γb} through the closed-form coefficient difference.
Vector solution_difference(const GeneralizedSpectrum& spec, double shift_a, double shift_b);

/// Orthogonal vs oblique projection of b onto Range(K + δ·EU), with the CS
/// factors that relate the two residuals.
struct CsAnalysis {
    Vector r1;     // (I − YYᵀ)b
    Vector r2;     // (I − Y(KᵀY)⁻¹Kᵀ)b
    Vector omega;  // singular values of YᵀK
    Vector sigma;  // sqrt(1 − ω²), from the column norms of (I − YYᵀ)KΨ
    Matrix yc;     // N × p, zero columns where ω = 1
    Matrix phi;    // left singular vectors of YᵀK
    Matrix y;      // orthonormal basis of Range(K + δ·EU)
    /// ‖Ω⁻¹ΣY_cᵀb‖₂
    double gap_norm = 0.0;
};

CsAnalysis cs_analysis(const Matrix& k, const Matrix& eu, double delta, const Vector& b);

/// min over Range(basis) of ‖b − M·x‖₂ via dense least squares.
double min_residual_over(const Matrix& m, const Matrix& basis, const Vector& b);

/// Reproducible random SPD A (spectrum in [lo, 1]) and SPSD E with a
/// nontrivial null space (E·1 = 0).
struct RandomPencil {
    Matrix a;
    Matrix e;
    Vector b;
};
RandomPencil random_pencil(Index n, std::uint64_t seed, double lo = 1e-3);

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed);
Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed);
Vector random_vector(Index n, std::uint64_t seed);

} // namespace shiftrecycle::oracle
