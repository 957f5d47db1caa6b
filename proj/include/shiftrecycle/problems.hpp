// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Test problems: Gaussian blur as a sum of Kronecker products, parallel-beam
// CT, the discrete gradient, phantoms and noise. Images are n×n and stored
// column-major: pixel (row i, column j) is entry i + n·j.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "shiftrecycle/common.hpp"
#include "shiftrecycle/operators.hpp"

namespace shiftrecycle::problems {

struct BlurParams {
    // Half-widths of the four 1-D Toeplitz factors C1^(1), C1^(2), C2^(1), C2^(2).
    std::array<int, 4> bandwidths{8, 7, 12, 4};
    std::array<double, 4> sigmas{3.0, 2.5, 4.0, 2.0};
};

/// Taps exp(−t²/(2σ²)) for |t| ≤ bandwidth. σ = 0 gives the unit impulse.
std::vector<double> gaussian_taps(int bandwidth, double sigma);

/// C = C1^(1) ⊗ C1^(2) + C2^(1) ⊗ C2^(2) with zero boundary conditions,
/// applied as column then row convolutions. Unscaled.
LinearOperator make_blur(Index n, const BlurParams& params = {});

struct SparseMatrix {
    Index rows = 0;
    Index cols = 0;
    std::vector<Index> row_ptr;
    std::vector<Index> col_idx;
    std::vector<double> values;

    void multiply(const Vector& x, Vector& y) const;
    void multiply_transpose(const Vector& x, Vector& y) const;
    double frobenius_norm() const;
};

/// Detector bins per angle: ⌈√2·n⌉, bumped by one when its parity differs
/// from n so that the 0° rays pass through pixel centres.
Index radon_bins(Index n);

/// Parallel-beam projection matrix from exact ray/pixel intersection lengths
/// (Siddon tracing). Row a·bins + j is bin j at angles_deg[a]. Unit pixels,
/// unit bin width, detector centred on the image.
SparseMatrix radon_matrix(Index n, const std::vector<double>& angles_deg);

/// radon_matrix wrapped as an operator, scaled to unit Frobenius norm when
/// `normalize` is set.
LinearOperator make_radon(Index n, const std::vector<double>& angles_deg, bool normalize = true);

/// [Δ_horizontal; Δ_vertical] forward differences, 2n(n−1) rows. Unscaled.
LinearOperator make_gradient(Index n);

/// clean + level·‖clean‖·g/‖g‖ with g ~ N(0, I) from mt19937_64(seed).
Vector add_noise(const Vector& clean, double level, std::uint64_t seed);

/// Piecewise-constant disc, rectangles and a bar on a zero background.
Vector geometric_phantom(Index n);
/// Modified Shepp-Logan head phantom (ten ellipses).
Vector shepp_logan(Index n);

enum class Kind { Blur, Ct };

struct ProblemSpec {
    std::string name;
    Kind kind = Kind::Blur;
    Index n = 0;
    LinearOperator c;     // forward operator, approximately unit norm
    LinearOperator l;     // gradient, unit spectral norm
    Vector x_true;
    Vector d;             // noisy data
    double noise_level = 0.0;
};

/// Blur problem: C scaled by a power-iteration estimate of ‖C‖₂.
ProblemSpec blur_problem(Index n, double noise_level, std::uint64_t seed, const BlurParams& params = {});
/// CT problem with angles 1°..135°: C scaled to unit Frobenius norm.
ProblemSpec ct_problem(Index n, double noise_level, std::uint64_t seed);

} // namespace shiftrecycle::problems
