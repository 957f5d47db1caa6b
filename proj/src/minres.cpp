// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shiftrecycle/minres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shiftrecycle/blas.hpp"
#include "shiftrecycle/kernels.hpp"

namespace shiftrecycle {

SymmetricMap as_map(const LinearOperator& op)
{
    if (op.rows() != op.cols()) throw DimensionError("Krylov solvers need a square operator");
    return {op.dim(), [op](const Vector& in, Vector& out) { op.apply(in, out); }};
}

SymmetricMap as_map(const ShiftedOperator& op)
{
    return {op.dim(), [op](const Vector& in, Vector& out) { op.apply(in, out); }};
}

dense::Matrix LanczosState::tridiagonal() const
{
    const Index m = iterations;
    dense::Matrix t = dense::Matrix::Zero(m + 1, m);
    for (Index j = 0; j < m; ++j) {
        t(j, j) = alpha[static_cast<std::size_t>(j)];
        t(j + 1, j) = beta[static_cast<std::size_t>(j)];
        if (j + 1 < m) t(j, j + 1) = beta[static_cast<std::size_t>(j)];
    }
    return t;
}

namespace detail {

MinresRecurrence::MinresRecurrence(Index n, Index companion, double beta1)
    : phibar_(beta1), d1_(Vector::Zero(n)), d2_(Vector::Zero(n)), cd1_(Vector::Zero(companion)),
      cd2_(Vector::Zero(companion)), x_(Vector::Zero(n)), cx_(Vector::Zero(companion))
{
}

double MinresRecurrence::step(double beta_j, double alpha_j, double beta_next, const Vector& v, const Vector* companion)
{
    // Previous two rotations applied to the new column of T̲.
    double t0 = s2_ * beta_j;
    double t1 = c2_ * beta_j;
    double t2 = alpha_j;
    const double rot = c1_ * t1 + s1_ * t2;
    t2 = -s1_ * t1 + c1_ * t2;
    t1 = rot;

    const double rho = std::hypot(t2, beta_next);
    if (rho == 0.0) throw Error("MINRES: singular projected operator");
    const double c = t2 / rho;
    const double s = beta_next / rho;
    const double eta = c * phibar_;
    phibar_ = -s * phibar_;

    // d_j = (v_j − t1·d_{j−1} − t0·d_{j−2}) / ρ, written into the oldest slot.
    const auto& k = kernels::active();
    const auto n = static_cast<std::size_t>(v.size());
    k.axpby(1.0 / rho, v.data(), -t0 / rho, d2_.data(), n);
    k.axpy(-t1 / rho, d1_.data(), d2_.data(), n);
    k.axpy(eta, d2_.data(), x_.data(), n);
    std::swap(d1_, d2_);

    if (companion != nullptr && cx_.size() > 0) {
        cd2_ = (*companion - t1 * cd1_ - t0 * cd2_) / rho;
        cx_ += eta * cd2_;
        std::swap(cd1_, cd2_);
    }

    c2_ = c1_;
    s2_ = s1_;
    c1_ = c;
    s1_ = s;
    return std::abs(phibar_);
}

} // namespace detail

namespace {

// Two-pass classical Gram-Schmidt of w against the first `stored` columns.
void reorthogonalize(const Block& basis, Index stored, Vector& w)
{
    if (stored == 0) return;
    const auto& k = kernels::active();
    const auto n = static_cast<std::size_t>(w.size());
    Vector c(stored);
    for (int pass = 0; pass < 2; ++pass) {
        k.gemv_t(basis.data(), n, n, static_cast<std::size_t>(stored), w.data(), c.data());
        k.gemv_n(basis.data(), n, n, static_cast<std::size_t>(stored), c.data(), -1.0, w.data());
    }
}

MinresResult run(const SymmetricMap& op, const Vector& b, const Vector& x0, Vector r0, const MinresOptions& opts)
{
    if (!(opts.tol > 0.0)) throw Error("minres_solve: tol must be positive");
    const Index n = op.dim;
    const double bnorm = blas::nrm2(b);
    const double denom = bnorm > 0.0 ? bnorm : 1.0;

    MinresResult res;
    const double beta1 = blas::nrm2(r0);
    res.lanczos.xi = beta1;
    res.relres.push_back(beta1 / denom);
    const Index cap = std::max(0, opts.store_cap);
    res.lanczos.basis = Block(n, 0);
    if (beta1 == 0.0 || beta1 / denom <= opts.tol) {
        res.x = x0;
        res.converged = true;
        return res;
    }

    Block basis(n, std::min<Index>(cap, std::max(opts.maxit, 0) + 1));
    Index stored = 0;
    Vector v = r0 / beta1;
    Vector v_prev = Vector::Zero(n);
    if (stored < basis.cols()) basis.col(stored++) = v;

    detail::MinresRecurrence rec(n, 0, beta1);
    double beta_j = 0.0;
    Vector w(n);
    const auto& k = kernels::active();
    const auto un = static_cast<std::size_t>(n);
    for (int it = 0; it < opts.maxit; ++it) {
        op.apply(v, w);
        const double alpha = blas::dot(v, w);
        k.axpy(-alpha, v.data(), w.data(), un);
        k.axpy(-beta_j, v_prev.data(), w.data(), un);
        // Full reorthogonalization while the next vector still fits the store.
        if (stored > 0 && stored < basis.cols()) reorthogonalize(basis, stored, w);
        const double beta_next = blas::nrm2(w);
        const bool invariant = beta_next <= 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(alpha) + beta_j);

        const double rnorm = rec.step(beta_j, alpha, invariant ? 0.0 : beta_next, v, nullptr);
        res.lanczos.alpha.push_back(alpha);
        res.lanczos.beta.push_back(invariant ? 0.0 : beta_next);
        ++res.iterations;
        res.relres.push_back(rnorm / denom);

        if (invariant) {
            res.breakdown = true;
            res.converged = true;
            break;
        }
        if (rnorm / denom <= opts.tol) {
            res.converged = true;
            break;
        }
        v_prev.swap(v);
        v = w / beta_next;
        if (stored < basis.cols()) basis.col(stored++) = v;
        beta_j = beta_next;
    }
    res.lanczos.iterations = res.iterations;
    res.lanczos.basis = basis.leftCols(stored);
    res.x = x0 + rec.x();
    return res;
}

} // namespace

MinresResult minres_solve(const SymmetricMap& op, const Vector& b, const Vector& x0, const MinresOptions& opts)
{
    if (b.size() != op.dim || x0.size() != op.dim) throw DimensionError("minres_solve: dimension mismatch");
    Vector ax(op.dim);
    op.apply(x0, ax);
    return run(op, b, x0, b - ax, opts);
}

MinresResult minres_solve(const SymmetricMap& op, const Vector& b, const MinresOptions& opts)
{
    if (b.size() != op.dim) throw DimensionError("minres_solve: dimension mismatch");
    return run(op, b, Vector::Zero(op.dim), b, opts);
}

RitzBundle extract_ritz(const LanczosState& state, const SymmetricMap& op, Index count)
{
    const Index stored = state.basis.cols();
    RitzBundle out;
    if (count > stored) {
        warn("extract_ritz: " + std::to_string(count) + " Ritz pairs requested from " + std::to_string(stored) +
             " stored Lanczos vectors; clamping");
        count = stored;
    }
    const Index n = op.dim;
    if (count <= 0) {
        out.vectors = Block(n, 0);
        out.values = Vector(0);
        out.residuals = Vector(0);
        return out;
    }
    Block image(n, stored);
    Vector col(n), w(n);
    for (Index j = 0; j < stored; ++j) {
        col = state.basis.col(j);
        op.apply(col, w);
        image.col(j) = w;
    }
    const dense::Matrix h = state.basis.transpose() * image;
    const dense::SymEig eig = dense::sym_eig(h);
    const dense::Matrix y = eig.vectors.leftCols(count);
    out.vectors = state.basis * y;
    out.values = eig.values.head(count);
    const Block resid = image * y - out.vectors * out.values.asDiagonal();
    out.residuals = resid.colwise().norm().transpose();
    return out;
}

} // namespace shiftrecycle
