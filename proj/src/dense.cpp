// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shiftrecycle/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace shiftrecycle::dense {

TallSkinnyFactor economy_qr(const Block& m)
{
    const Index n = m.rows();
    const Index p = m.cols();
    if (p > n) throw DimensionError("economy_qr: more columns (" + std::to_string(p) + ") than rows (" + std::to_string(n) + ")");
    TallSkinnyFactor f;
    if (p == 0) {
        f.q = Block(n, 0);
        f.r = Matrix(0, 0);
        return f;
    }
    Eigen::HouseholderQR<Block> qr(m);
    f.q = qr.householderQ() * Block::Identity(n, p);
    f.r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    for (Index i = 0; i < p; ++i) {
        if (f.r(i, i) < 0.0) {
            f.r.row(i) *= -1.0;
            f.q.col(i) *= -1.0;
        }
    }
    const Vector diag = f.r.diagonal();
    const double big = diag.maxCoeff();
    const double small = diag.minCoeff();
    f.rank_deficient = !(big > 0.0) || small < kRankTol * big;
    return f;
}

Block truncated_orthonormal_basis(const Block& m, double cond_cap)
{
    if (!(cond_cap > 1.0)) throw Error("truncated_orthonormal_basis: cond_cap must exceed 1");
    const Index n = m.rows();
    if (m.cols() == 0) return Block(n, 0);
    auto truncate = [&](const Vector& s, const Matrix& u, const Block* q) -> Block {
        if (!(s.size() > 0 && s[0] > 0.0)) return Block(n, 0);
        Index keep = 0;
        while (keep < s.size() && s[keep] > 0.0 && s[0] / s[keep] < cond_cap) ++keep;
        return q != nullptr ? Block(*q * u.leftCols(keep)) : Block(u.leftCols(keep));
    };
    if (m.cols() > n) {
        Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
        return truncate(svd.singularValues(), svd.matrixU(), nullptr);
    }
    // Tall-skinny: the SVD of the p×p triangular factor carries the singular
    // values of m.
    const TallSkinnyFactor f = economy_qr(m);
    Eigen::BDCSVD<Matrix> svd(f.r, Eigen::ComputeFullU);
    return truncate(svd.singularValues(), svd.matrixU(), &f.q);
}

SymEig sym_eig(const Matrix& h)
{
    if (h.rows() != h.cols()) throw DimensionError("sym_eig: matrix must be square");
    SymEig out;
    if (h.rows() == 0) {
        out.values = Vector(0);
        out.vectors = Matrix(0, 0);
        return out;
    }
    const Matrix sym = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) throw Error("sym_eig: eigensolver did not converge");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
    return out;
}

Vector spd_solve(const Matrix& g, const Vector& rhs, int tag)
{
    if (g.rows() != g.cols() || g.rows() != rhs.size()) throw DimensionError("spd_solve: dimension mismatch");
    if (g.rows() == 0) return Vector(0);
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) {
        std::string what = "spd_solve: Cholesky breakdown (non-positive pivot)";
        if (tag >= 0) what += " for shift index " + std::to_string(tag);
        throw NotPositiveDefinite(what, tag);
    }
    return llt.solve(rhs);
}

LeastSquares lstsq(const Matrix& m, const Vector& rhs)
{
    if (m.rows() != rhs.size()) throw DimensionError("lstsq: rhs length does not match rows");
    if (m.cols() > m.rows()) throw DimensionError("lstsq: underdetermined system");
    LeastSquares out;
    if (m.cols() == 0) {
        out.x = Vector(0);
        return out;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    qr.setThreshold(kRankTol);
    out.x = qr.solve(rhs);
    out.rank_deficient = qr.rank() < m.cols();
    return out;
}

Vector solve_upper(const Matrix& r, const Vector& b)
{
    if (r.rows() != r.cols() || r.rows() != b.size()) throw DimensionError("solve_upper: dimension mismatch");
    return r.triangularView<Eigen::Upper>().solve(b);
}

} // namespace shiftrecycle::dense
