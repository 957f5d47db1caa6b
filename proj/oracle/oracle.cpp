// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace shiftrecycle::oracle {

Matrix to_dense(const LinearOperator& op)
{
    Matrix m(op.rows(), op.cols());
    Vector e = Vector::Zero(op.cols());
    Vector col(op.rows());
    for (Index j = 0; j < op.cols(); ++j) {
        e[j] = 1.0;
        op.apply_uncounted(e, col);
        m.col(j) = col;
        e[j] = 0.0;
    }
    return m;
}

LinearOperator from_dense(const Matrix& m, bool symmetric)
{
    if (symmetric) return LinearOperator::symmetric(m.rows(), [m](const Vector& in, Vector& out) { out = m * in; }, "dense");
    return LinearOperator(
        m.rows(), m.cols(), [m](const Vector& in, Vector& out) { out = m * in; },
        [m](const Vector& in, Vector& out) { out = m.transpose() * in; }, false, "dense");
}

Vector dense_solve(const Matrix& a, const Matrix& e, double shift, const Vector& b)
{
    const Matrix s = a + shift * e;
    Eigen::LLT<Matrix> llt(0.5 * (s + s.transpose()));
    if (llt.info() != Eigen::Success) throw Error("dense_solve: A + γE is not positive definite");
    return llt.solve(b);
}

GeneralizedSpectrum generalized_spectrum(const Matrix& a, const Matrix& e, const Vector& b)
{
    // A = LLᵀ; the standard problem L⁻¹EL⁻ᵀ q = μq gives V = L⁻ᵀQ.
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw Error("generalized_spectrum: A is not SPD");
    const Matrix lower = llt.matrixL();
    const Matrix linv_e = lower.triangularView<Eigen::Lower>().solve(e);
    Matrix t = lower.triangularView<Eigen::Lower>().solve(linv_e.transpose()).transpose();
    t = 0.5 * (t + t.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    const Index n = a.rows();
    GeneralizedSpectrum out;
    out.mu.resize(n);
    Matrix q(n, n);
    for (Index j = 0; j < n; ++j) {
        out.mu[j] = es.eigenvalues()[n - 1 - j];
        q.col(j) = es.eigenvectors().col(n - 1 - j);
    }
    out.v = lower.transpose().triangularView<Eigen::Upper>().solve(q);
    out.dtilde = out.v.transpose() * b;
    return out;
}

Vector solution_via_spectrum(const GeneralizedSpectrum& spec, double shift)
{
    const Vector f = (spec.dtilde.array() / (1.0 + shift * spec.mu.array())).matrix();
    return spec.v * f;
}

Vector solution_difference(const GeneralizedSpectrum& spec, double shift_a, double shift_b)
{
    const auto mu = spec.mu.array();
    const Vector coeff = ((shift_b - shift_a) * mu / ((1.0 + shift_b * mu) * (1.0 + shift_a * mu)) * spec.dtilde.array()).matrix();
    return spec.v * coeff;
}

CsAnalysis cs_analysis(const Matrix& k, const Matrix& eu, double delta, const Vector& b)
{
    const Index n = k.rows();
    const Index p = k.cols();
    CsAnalysis out;
    Eigen::HouseholderQR<Matrix> qr(k + delta * eu);
    out.y = qr.householderQ() * Matrix::Identity(n, p);

    const Matrix ytk = out.y.transpose() * k;
    Eigen::JacobiSVD<Matrix> svd(ytk, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.omega = svd.singularValues();
    out.phi = svd.matrixU();
    const Matrix psi = svd.matrixV();
    if (out.omega.minCoeff() <= 0.0)
        throw Error("cs_analysis: YᵀK is singular (smallest ω = " + std::to_string(out.omega.minCoeff()) + ")");

    const Matrix comp = k * psi - out.y * (out.y.transpose() * (k * psi));
    out.sigma.resize(p);
    out.yc = Matrix::Zero(n, p);
    for (Index j = 0; j < p; ++j) {
        const double s = comp.col(j).norm();
        out.sigma[j] = s;
        if (s > 1e-14) out.yc.col(j) = comp.col(j) / s;
    }

    const Vector q1 = out.y.transpose() * b;
    out.r1 = b - out.y * q1;
    const Vector q2 = (k.transpose() * out.y).partialPivLu().solve(k.transpose() * b);
    out.r2 = b - out.y * q2;
    const Vector gap = (out.sigma.array() / out.omega.array() * (out.yc.transpose() * b).array()).matrix();
    out.gap_norm = gap.norm();
    return out;
}

double min_residual_over(const Matrix& m, const Matrix& basis, const Vector& b)
{
    const Matrix img = m * basis;
    const Vector c = img.colPivHouseholderQr().solve(b);
    return (b - img * c).norm();
}

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
    return m;
}

Vector random_vector(Index n, std::uint64_t seed) { return random_matrix(n, 1, seed).col(0); }

Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed)
{
    Eigen::HouseholderQR<Matrix> qr(random_matrix(rows, cols, seed));
    return qr.householderQ() * Matrix::Identity(rows, cols);
}

RandomPencil random_pencil(Index n, std::uint64_t seed, double lo)
{
    RandomPencil p;
    const Matrix q = random_orthonormal(n, n, seed);
    Vector lam(n);
    for (Index i = 0; i < n; ++i) lam[i] = std::pow(lo, static_cast<double>(i) / static_cast<double>(std::max<Index>(n - 1, 1)));
    p.a = q * lam.asDiagonal() * q.transpose();
    p.a = 0.5 * (p.a + p.a.transpose());
    // E = GᵀG with G annihilating constants: a random first-difference mix.
    const Matrix g0 = random_matrix(n, n, seed + 1);
    Matrix g = g0;
    const Vector rowmean = g0.rowwise().mean();
    for (Index j = 0; j < n; ++j) g.col(j) -= rowmean;
    p.e = g.transpose() * g / static_cast<double>(n);
    p.e = 0.5 * (p.e + p.e.transpose());
    p.b = random_vector(n, seed + 2);
    return p;
}

} // namespace shiftrecycle::oracle
