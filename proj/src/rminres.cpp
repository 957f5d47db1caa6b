// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shiftrecycle/rminres.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "shiftrecycle/blas.hpp"
#include "shiftrecycle/kernels.hpp"

namespace shiftrecycle {

namespace {

constexpr double kImageCondCap = 1e10;

// w ← (I − KKᵀ)w, twice; returns the removed coefficients Kᵀw.
Vector project_out(const Block& k, Vector& w)
{
    Vector c = blas::gemv_t(k, w);
    blas::gemv_n(k, c, -1.0, w);
    const Vector c2 = blas::gemv_t(k, w);
    blas::gemv_n(k, c2, -1.0, w);
    return c + c2;
}

} // namespace

Vector RecycleFactor::apply_u(const Vector& z) const
{
    if (z.size() == 0) return Vector::Zero(u_tilde.rows());
    return u_tilde * dense::solve_upper(r, z);
}

RecycleFactor RecycleFactor::empty(Index n) { return {Block(n, 0), dense::Matrix(0, 0), Block(n, 0)}; }

RecycleFactor recycle_factor_from_image(const Block& u_tilde, const Block& image)
{
    if (u_tilde.rows() != image.rows() || u_tilde.cols() != image.cols())
        throw DimensionError("recycle_factor_from_image: Ũ and its image differ in shape");
    const Index n = u_tilde.rows();
    if (u_tilde.cols() == 0) return RecycleFactor::empty(n);
    dense::TallSkinnyFactor f = dense::economy_qr(image);
    const double rmax = f.r.diagonal().maxCoeff();
    const double rmin = f.r.diagonal().minCoeff();
    if (!f.rank_deficient && rmin * kImageCondCap > rmax) return {u_tilde, f.r, f.q};

    // Rank-deficient image: keep the well-conditioned part of the pencil
    // image and the matching combinations of Ũ.
    Eigen::BDCSVD<dense::Matrix> svd(f.r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    Index keep = 0;
    while (keep < s.size() && s[keep] > 0.0 && s[0] / s[keep] < kImageCondCap) ++keep;
    warn("recycle factor: dropped " + std::to_string(u_tilde.cols() - keep) + " of " + std::to_string(u_tilde.cols()) +
         " columns with numerically dependent images");
    if (keep == 0) return RecycleFactor::empty(n);
    // image·V = Q·U_r·S, so Ũ·V_keep has orthonormal image Q·U_r(:,keep) and R = S_keep.
    RecycleFactor rf;
    rf.u_tilde = u_tilde * svd.matrixV().leftCols(keep);
    rf.k = f.q * svd.matrixU().leftCols(keep);
    rf.r = s.head(keep).asDiagonal();
    return rf;
}

RecycleFactor build_recycle_factor(const ShiftedOperator& op, const Block& u_tilde)
{
    const Index n = op.dim();
    if (u_tilde.rows() != n) throw DimensionError("build_recycle_factor: Ũ has the wrong row count");
    Block image(n, u_tilde.cols());
    Vector col(n), out(n);
    for (Index j = 0; j < u_tilde.cols(); ++j) {
        col = u_tilde.col(j);
        op.apply(col, out);
        image.col(j) = out;
    }
    return recycle_factor_from_image(u_tilde, image);
}

RminresResult rminres_solve(const ShiftedOperator& op, const Vector& rhs, const RecycleFactor& rf,
                            const RminresOptions& opts)
{
    const Index n = op.dim();
    if (rhs.size() != n || rf.k.rows() != n) throw DimensionError("rminres_solve: dimension mismatch");
    const Index p = rf.size();
    const double ref = opts.ref_norm > 0.0 ? opts.ref_norm : 1.0;

    RminresResult res;
    Vector u = rhs;
    const Vector ktr = project_out(rf.k, u);
    const double xi = blas::nrm2(u);
    res.xi = xi;
    res.relres.push_back(xi / ref);
    if (opts.record) {
        res.ktr = ktr;
        res.basis = Block(n, 0);
        res.projection = dense::Matrix(p, 0);
    }
    if (xi == 0.0 || xi <= opts.target) {
        res.g = rf.apply_u(ktr);
        res.converged = true;
        return res;
    }

    std::vector<Vector> kept;
    std::vector<Vector> proj_cols;
    Vector v = u / xi;
    Vector v_prev = Vector::Zero(n);
    Vector w(n);
    detail::MinresRecurrence rec(n, p, xi);
    double beta_j = 0.0;
    const auto& k = kernels::active();
    const auto un = static_cast<std::size_t>(n);
    for (int it = 0; it < opts.maxit; ++it) {
        op.apply(v, w);
        // Kᵀ·op·v_j is the new column of the small projection block.
        const Vector bj = project_out(rf.k, w);
        const double alpha = blas::dot(v, w);
        k.axpy(-alpha, v.data(), w.data(), un);
        k.axpy(-beta_j, v_prev.data(), w.data(), un);
        const double beta_next = blas::nrm2(w);
        const bool invariant = beta_next <= 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(alpha) + beta_j);

        const double rnorm = rec.step(beta_j, alpha, invariant ? 0.0 : beta_next, v, &bj);
        ++res.iterations;
        res.relres.push_back(rnorm / ref);
        if (opts.record) {
            kept.push_back(v);
            proj_cols.push_back(bj);
            res.alpha.push_back(alpha);
            res.beta.push_back(invariant ? 0.0 : beta_next);
        }
        if (invariant || rnorm <= opts.target) {
            res.converged = true;
            break;
        }
        v_prev.swap(v);
        v = w / beta_next;
        beta_j = beta_next;
    }

    // g = V_m y + U (Kᵀrhs − Kᵀ·op·V_m y).
    res.g = rec.x();
    if (p > 0) res.g += rf.apply_u(ktr - rec.companion_x());

    if (opts.record) {
        res.basis = Block(n, static_cast<Index>(kept.size()));
        res.projection = dense::Matrix(p, static_cast<Index>(kept.size()));
        for (std::size_t j = 0; j < kept.size(); ++j) {
            res.basis.col(static_cast<Index>(j)) = kept[j];
            if (p > 0) res.projection.col(static_cast<Index>(j)) = proj_cols[j];
        }
    }
    return res;
}

} // namespace shiftrecycle
