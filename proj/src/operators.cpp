// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shiftrecycle/operators.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <random>

#include "shiftrecycle/blas.hpp"
#include "shiftrecycle/kernels.hpp"

namespace shiftrecycle {

namespace {

std::mutex& sink_mutex()
{
    static std::mutex m;
    return m;
}

WarningSink& sink()
{
    static WarningSink s = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return s;
}

void check_len(const Vector& v, Index n, const std::string& who)
{
    if (v.size() != n)
        throw DimensionError(who + ": vector of length " + std::to_string(v.size()) + ", expected " + std::to_string(n));
}

} // namespace

void set_warning_sink(WarningSink s)
{
    std::lock_guard lock(sink_mutex());
    sink() = s ? std::move(s) : [](const std::string&) {};
}

void warn(const std::string& message)
{
    std::lock_guard lock(sink_mutex());
    sink()(message);
}

LinearOperator::LinearOperator(Index rows, Index cols, ApplyFn apply, ApplyFn adjoint, bool symmetric, std::string name)
    : rows_(rows), cols_(cols), apply_(std::move(apply)), adjoint_(std::move(adjoint)), symmetric_(symmetric),
      name_(std::move(name)), counter_(std::make_shared<MatvecCounter>())
{
    if (rows <= 0 || cols <= 0) throw DimensionError("LinearOperator: dimensions must be positive");
    if (symmetric && rows != cols) throw DimensionError("LinearOperator: symmetric operator must be square");
}

LinearOperator LinearOperator::symmetric(Index n, ApplyFn apply, std::string name)
{
    ApplyFn adj = apply;
    return LinearOperator(n, n, std::move(apply), std::move(adj), true, std::move(name));
}

Vector LinearOperator::apply(const Vector& v) const
{
    Vector out(rows_);
    apply(v, out);
    return out;
}

void LinearOperator::apply(const Vector& v, Vector& out) const
{
    apply_uncounted(v, out);
    counter_->add();
}

Vector LinearOperator::apply_adjoint(const Vector& v) const
{
    Vector out(cols_);
    apply_adjoint(v, out);
    return out;
}

void LinearOperator::apply_adjoint(const Vector& v, Vector& out) const
{
    apply_adjoint_uncounted(v, out);
    counter_->add();
}

void LinearOperator::apply_uncounted(const Vector& v, Vector& out) const
{
    check_len(v, cols_, name_.empty() ? "apply" : name_);
    out.resize(rows_);
    apply_(v, out);
}

void LinearOperator::apply_adjoint_uncounted(const Vector& v, Vector& out) const
{
    if (!adjoint_) throw Error("operator '" + name_ + "' has no adjoint");
    check_len(v, rows_, name_.empty() ? "apply_adjoint" : name_);
    out.resize(cols_);
    adjoint_(v, out);
}

LinearOperator LinearOperator::with_counter(std::shared_ptr<MatvecCounter> counter) const
{
    LinearOperator copy = *this;
    copy.counter_ = std::move(counter);
    return copy;
}

LinearOperator LinearOperator::scaled(double s, std::string name) const
{
    const LinearOperator base = *this;
    ApplyFn fwd = [base, s](const Vector& in, Vector& out) {
        base.apply_uncounted(in, out);
        out *= s;
    };
    ApplyFn adj;
    if (adjoint_) {
        adj = [base, s](const Vector& in, Vector& out) {
            base.apply_adjoint_uncounted(in, out);
            out *= s;
        };
    }
    return LinearOperator(rows_, cols_, std::move(fwd), std::move(adj), symmetric_, name.empty() ? name_ : std::move(name));
}

ShiftedOperator::ShiftedOperator(LinearOperator a, LinearOperator e, double shift)
    : a_(std::move(a)), e_(std::move(e)), shift_(shift)
{
    if (a_.rows() != a_.cols() || e_.rows() != e_.cols() || a_.dim() != e_.dim())
        throw DimensionError("ShiftedOperator: A and E must be square with equal dimension");
    if (!(shift >= 0.0)) throw Error("ShiftedOperator: shift must be nonnegative");
}

Vector ShiftedOperator::apply(const Vector& v) const
{
    Vector out(dim());
    apply(v, out);
    return out;
}

void ShiftedOperator::apply(const Vector& v, Vector& out) const
{
    Vector av, ev;
    apply_parts(v, av, ev, out);
}

void ShiftedOperator::apply_parts(const Vector& v, Vector& av, Vector& ev, Vector& out) const
{
    a_.apply(v, av);
    e_.apply(v, ev);
    blas::waxpby(1.0, av, shift_, ev, out);
}

LinearOperator compose_normal(const LinearOperator& c)
{
    if (!c.has_adjoint()) throw Error("compose_normal: factor needs an adjoint");
    const LinearOperator base = c;
    return LinearOperator::symmetric(
        c.cols(),
        [base](const Vector& in, Vector& out) {
            Vector tmp(base.rows());
            base.apply_uncounted(in, tmp);
            base.apply_adjoint_uncounted(tmp, out);
        },
        "CtC");
}

namespace {

LinearOperator weighted_gram(const LinearOperator& l, Vector weights, bool squared, std::string name)
{
    const LinearOperator base = l;
    return LinearOperator::symmetric(
        l.cols(),
        [base, weights = std::move(weights), squared](const Vector& in, Vector& out) {
            Vector tmp(base.rows());
            base.apply_uncounted(in, tmp);
            const auto n = static_cast<std::size_t>(tmp.size());
            if (squared)
                kernels::active().sqweight(weights.data(), tmp.data(), tmp.data(), n);
            else
                tmp.array() *= weights.array();
            base.apply_adjoint_uncounted(tmp, out);
        },
        std::move(name));
}

} // namespace

LinearOperator compose_weighted_laplacian(const LinearOperator& l, const Vector& weights)
{
    if (!l.has_adjoint()) throw Error("compose_weighted_laplacian: L needs an adjoint");
    if (weights.size() != l.rows())
        throw DimensionError("compose_weighted_laplacian: " + std::to_string(weights.size()) +
                             " weights for an operator with " + std::to_string(l.rows()) + " rows");
    for (Index i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0 && weights[i] <= 1.0))
            throw Error("compose_weighted_laplacian: weight " + std::to_string(i) + " = " + std::to_string(weights[i]) +
                        " outside [0, 1]");
    }
    return weighted_gram(l, weights, true, "LtD2L");
}

LinearOperator compose_weight_difference(const LinearOperator& l, const Vector& weights_new, const Vector& weights_old)
{
    if (weights_new.size() != l.rows() || weights_old.size() != l.rows())
        throw DimensionError("compose_weight_difference: weight length mismatch");
    Vector diff = weights_new.array().square() - weights_old.array().square();
    return weighted_gram(l, std::move(diff), false, "Lt(dD2)L");
}

double estimate_norm2(const LinearOperator& op, int iterations, double tol, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Vector v(op.cols());
    for (Index i = 0; i < v.size(); ++i) v[i] = g(rng);
    v /= v.norm();
    const bool square_sym = op.is_symmetric();
    double sigma = 0.0;
    Vector w(op.rows()), z(op.cols());
    for (int it = 0; it < iterations; ++it) {
        op.apply_uncounted(v, w);
        if (square_sym) {
            op.apply_uncounted(w, z);
        } else {
            op.apply_adjoint_uncounted(w, z);
        }
        // z = opᵀop v; its Rayleigh quotient estimates σ².
        const double next = std::sqrt(std::abs(blas::dot(v, z)));
        const double zn = z.norm();
        if (zn == 0.0) return 0.0;
        v = z / zn;
        if (it > 0 && std::abs(next - sigma) <= tol * next) {
            sigma = next;
            break;
        }
        sigma = next;
    }
    return sigma;
}

} // namespace shiftrecycle
