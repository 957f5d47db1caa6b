// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shiftrecycle/recycle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "shiftrecycle/blas.hpp"

namespace shiftrecycle {

namespace {

constexpr double kImageCondCap = 1e10;
constexpr double kNormalEqCondCap = 1e10;
constexpr double kObliqueRcond = 1e-14;

// QR of the anchored image; dependent image columns are mixed away and the
// same mix is applied to Ũ and its cached products.
void factor_anchor(PrincipalSpace& ps)
{
    const Block image = ps.au + ps.anchor_shift * ps.eu_tilde;
    dense::TallSkinnyFactor f = dense::economy_qr(image);
    const Index p = image.cols();
    if (p == 0) {
        ps.k = f.q;
        ps.r = f.r;
        return;
    }
    const double rmax = f.r.diagonal().maxCoeff();
    const double rmin = f.r.diagonal().minCoeff();
    if (!f.rank_deficient && rmin * kImageCondCap > rmax) {
        ps.k = std::move(f.q);
        ps.r = std::move(f.r);
        return;
    }
    Eigen::BDCSVD<dense::Matrix> svd(f.r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    Index keep = 0;
    while (keep < s.size() && s[keep] > 0.0 && s[0] / s[keep] < kImageCondCap) ++keep;
    warn("principal space: dropped " + std::to_string(p - keep) + " of " + std::to_string(p) +
         " columns with numerically dependent images");
    const dense::Matrix mix = svd.matrixV().leftCols(keep);
    ps.u_tilde = ps.u_tilde * mix;
    ps.au = ps.au * mix;
    ps.eu_tilde = ps.eu_tilde * mix;
    ps.k = f.q * svd.matrixU().leftCols(keep);
    ps.r = s.head(keep).asDiagonal();
}

void form_grams(PrincipalSpace& ps, const Vector& b)
{
    const Index p = ps.size();
    // EU = EŨR⁻¹, i.e. R⁻ᵀ applied to the rows of (EŨ)ᵀ.
    ps.eu = ps.r.transpose().triangularView<Eigen::Lower>().solve(ps.eu_tilde.transpose()).transpose();
    ps.gram_keu = ps.k.transpose() * ps.eu;
    ps.gram_eueu = ps.eu.transpose() * ps.eu;
    ps.vec_ueb = blas::gemv_t(ps.eu, b);
    ps.ktb = blas::gemv_t(ps.k, b);
    ps.a_hat = ps.u_tilde.transpose() * ps.au;
    ps.e_hat = ps.u_tilde.transpose() * ps.eu_tilde;
    ps.a_hat = 0.5 * (ps.a_hat + ps.a_hat.transpose()).eval();
    ps.e_hat = 0.5 * (ps.e_hat + ps.e_hat.transpose()).eval();

    Block stack(ps.k.rows(), 2 * p);
    stack << ps.k, ps.eu;
    dense::TallSkinnyFactor sf = dense::economy_qr(stack);
    ps.stack_r = std::move(sf.r);
    ps.stack_qtb = blas::gemv_t(sf.q, b);
}

void finish_guess(InitialGuess& g, const PrincipalSpace& ps, const ShiftedOperator& op, const Vector& b)
{
    g.x0 = ps.apply_u(g.q);
    g.r0 = b - op.apply(g.x0);
}

Vector orth_coefficients_qr(const PrincipalSpace& ps, double delta)
{
    const Index p = ps.size();
    const dense::Matrix m = ps.stack_r.leftCols(p) + delta * ps.stack_r.rightCols(p);
    return dense::lstsq(m, ps.stack_qtb).x;
}

} // namespace

Vector PrincipalSpace::apply_u(const Vector& q) const
{
    if (q.size() == 0) return Vector::Zero(u_tilde.rows());
    return u_tilde * dense::solve_upper(r, q);
}

Block init_principal(const Vector& x_i1, const Vector& x_i2, const RitzBundle& v_i1, const RitzBundle& v_i2)
{
    const Index n = x_i1.size();
    if (x_i2.size() != n || v_i1.vectors.rows() != n || v_i2.vectors.rows() != n)
        throw DimensionError("init_principal: dimension mismatch");
    Block raw(n, 2 + v_i1.vectors.cols() + v_i2.vectors.cols());
    raw << x_i1, x_i2, v_i1.vectors, v_i2.vectors;
    return raw;
}

Block stabilize(const Block& raw, double cond_cap) { return dense::truncated_orthonormal_basis(raw, cond_cap); }

PrincipalSpace anchor(const Block& u_tilde, const ShiftedOperator& op_at_anchor, const Vector& b)
{
    const Index n = op_at_anchor.dim();
    if (u_tilde.rows() != n || b.size() != n) throw DimensionError("anchor: dimension mismatch");
    PrincipalSpace ps;
    ps.u_tilde = u_tilde;
    ps.anchor_shift = op_at_anchor.shift();
    const Index p = u_tilde.cols();
    ps.au.resize(n, p);
    ps.eu_tilde.resize(n, p);
    const LinearOperator& a = op_at_anchor.base_a();
    const LinearOperator& e = op_at_anchor.base_e();
    Vector col(n), out(n);
    for (Index j = 0; j < p; ++j) {
        col = u_tilde.col(j);
        a.apply(col, out);
        ps.au.col(j) = out;
        e.apply(col, out);
        ps.eu_tilde.col(j) = out;
    }
    factor_anchor(ps);
    form_grams(ps, b);
    return ps;
}

PrincipalSpace reanchor(const PrincipalSpace& ps, double shift, const Vector& b)
{
    PrincipalSpace out;
    out.u_tilde = ps.u_tilde;
    out.au = ps.au;
    out.eu_tilde = ps.eu_tilde;
    out.anchor_shift = shift;
    factor_anchor(out);
    form_grams(out, b);
    return out;
}

InitialGuess initial_guess_orth(const PrincipalSpace& ps, const ShiftedOperator& op, const Vector& b, int shift_index)
{
    const Index p = ps.size();
    const double delta = op.shift() - ps.anchor_shift;
    InitialGuess g;
    if (p == 0) {
        g.q = Vector(0);
        finish_guess(g, ps, op, b);
        return g;
    }
    dense::Matrix gm = dense::Matrix::Identity(p, p) + delta * (ps.gram_keu + ps.gram_keu.transpose()) +
                       delta * delta * ps.gram_eueu;
    gm = 0.5 * (gm + gm.transpose()).eval();
    const Vector rhs = ps.ktb + delta * ps.vec_ueb;

    Eigen::LLT<dense::Matrix> llt(gm);
    bool use_qr = llt.info() != Eigen::Success;
    if (use_qr) {
        warn("orthogonal initial guess: normal equations not positive definite at shift index " +
             std::to_string(shift_index) + "; using the QR route");
    } else {
        const auto d = llt.matrixLLT().diagonal().cwiseAbs();
        const double ratio = d.maxCoeff() / d.minCoeff();
        use_qr = !(ratio * ratio < kNormalEqCondCap);
    }
    if (use_qr) {
        g.q = orth_coefficients_qr(ps, delta);
        g.fallback = true;
    } else {
        g.q = llt.solve(rhs);
    }
    finish_guess(g, ps, op, b);
    return g;
}

InitialGuess initial_guess_oblique(const PrincipalSpace& ps, const ShiftedOperator& op, const Vector& b,
                                   int shift_index)
{
    const Index p = ps.size();
    const double delta = op.shift() - ps.anchor_shift;
    if (p == 0) return initial_guess_orth(ps, op, b, shift_index);
    const dense::Matrix m = dense::Matrix::Identity(p, p) + delta * ps.gram_keu;
    Eigen::PartialPivLU<dense::Matrix> lu(m);
    if (!(lu.rcond() > kObliqueRcond)) {
        warn("oblique initial guess: I + δKᵀEU is singular at shift index " + std::to_string(shift_index) +
             "; using the orthogonal guess");
        InitialGuess g = initial_guess_orth(ps, op, b, shift_index);
        g.fallback = true;
        return g;
    }
    InitialGuess g;
    g.q = lu.solve(ps.ktb);
    finish_guess(g, ps, op, b);
    return g;
}

Block projected_pencil_ritz(const PrincipalSpace& ps, double shift, Index count)
{
    const Index p = ps.size();
    const Index m = std::clamp<Index>(count, 0, p);
    if (count > p) warn("projected_pencil_ritz: requested " + std::to_string(count) + " vectors from a space of size " +
                        std::to_string(p));
    if (m == 0) return Block(ps.u_tilde.rows(), 0);
    const dense::SymEig eig = dense::sym_eig(ps.a_hat + shift * ps.e_hat);
    return ps.u_tilde * eig.vectors.leftCols(m);
}

GroupSeed make_group_seed(const PrincipalSpace& ps, double shift, Index count, const LinearOperator& a,
                          const LinearOperator& e)
{
    GroupSeed s;
    s.w = projected_pencil_ritz(ps, shift, count);
    const Index n = s.w.rows();
    s.aw.resize(n, s.w.cols());
    s.ew.resize(n, s.w.cols());
    Vector col(n), out(n);
    for (Index j = 0; j < s.w.cols(); ++j) {
        col = s.w.col(j);
        a.apply(col, out);
        s.aw.col(j) = out;
        e.apply(col, out);
        s.ew.col(j) = out;
    }
    return s;
}

LocalSpace update_local(int shift_index, const GroupSeed& seed, const Vector* g_prev_outer, const Vector* g_prev_shift,
                        const ShiftedOperator& op, const LocalSpaceOptions& opts)
{
    const Index n = op.dim();
    std::vector<Vector> carried;
    for (const Vector* g : {g_prev_outer, g_prev_shift}) {
        if (g == nullptr || g->size() == 0) continue;
        if (g->size() != n) throw DimensionError("update_local: correction has the wrong length");
        const double nrm = blas::nrm2(*g);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) continue;
        Vector unit = *g / nrm;
        bool duplicate = false;
        for (const Vector& c : carried)
            if (std::abs(blas::dot(c, unit)) > opts.duplicate_cos) duplicate = true;
        if (!duplicate) carried.push_back(std::move(unit));
    }
    const Index nw = std::min<Index>(seed.w.cols(), std::max<Index>(opts.max_columns - static_cast<Index>(carried.size()), 0));

    LocalSpace ls;
    ls.shift_index = shift_index;
    ls.carried = static_cast<int>(carried.size());
    const Index p = nw + static_cast<Index>(carried.size());
    ls.u_tilde.resize(n, p);
    Block image(n, p);
    if (nw > 0) {
        ls.u_tilde.leftCols(nw) = seed.w.leftCols(nw);
        image.leftCols(nw) = seed.aw.leftCols(nw) + op.shift() * seed.ew.leftCols(nw);
    }
    Vector out(n);
    for (std::size_t j = 0; j < carried.size(); ++j) {
        const Index c = nw + static_cast<Index>(j);
        ls.u_tilde.col(c) = carried[j];
        op.apply(carried[j], out);
        image.col(c) = out;
    }
    ls.factor = recycle_factor_from_image(ls.u_tilde, image);
    return ls;
}

Block update_principal(const RitzBundle& v_i1, const Block& v_new, const std::vector<Vector>& previous_solutions)
{
    const Index n = v_i1.vectors.rows();
    if (v_new.cols() > 0 && v_new.rows() != n) throw DimensionError("update_principal: V_new has the wrong row count");
    Block raw(n, v_i1.vectors.cols() + v_new.cols() + static_cast<Index>(previous_solutions.size()));
    Index c = 0;
    raw.middleCols(c, v_i1.vectors.cols()) = v_i1.vectors;
    c += v_i1.vectors.cols();
    if (v_new.cols() > 0) raw.middleCols(c, v_new.cols()) = v_new;
    c += v_new.cols();
    for (const Vector& x : previous_solutions) {
        if (x.size() != n) throw DimensionError("update_principal: solution has the wrong length");
        raw.col(c++) = x;
    }
    return raw;
}

CorrectionSolve correction_system_solve(const ShiftedOperator& op_at_lc, const LinearOperator& weight_change,
                                        const Vector& x_prev, int maxit, double tol)
{
    const Index n = op_at_lc.dim();
    if (x_prev.size() != n) throw DimensionError("correction_system_solve: x_prev has the wrong length");
    CorrectionSolve cs;
    const Vector rhs = op_at_lc.shift() * weight_change.apply(x_prev);
    if (!(blas::nrm2(rhs) > 0.0)) {
        cs.dx = Vector::Zero(n);
        cs.v_new = Block(n, 0);
        return cs;
    }
    MinresOptions mo;
    mo.tol = tol;
    mo.maxit = maxit;
    mo.store_cap = maxit;
    MinresResult r = minres_solve(op_at_lc, rhs, mo);
    cs.dx = std::move(r.x);
    cs.iterations = r.iterations;
    const Block& basis = r.lanczos.basis;
    const Index nv = std::min<Index>(basis.cols(), maxit);
    cs.v_new.resize(n, 1 + nv);
    cs.v_new.col(0) = cs.dx;
    if (nv > 0) cs.v_new.rightCols(nv) = basis.leftCols(nv);
    return cs;
}

} // namespace shiftrecycle
