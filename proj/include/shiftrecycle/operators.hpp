// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "shiftrecycle/common.hpp"

namespace shiftrecycle {

/// Monotone apply counter shared by every handle to the same base operator.
class MatvecCounter {
public:
    void add(std::uint64_t n = 1) { count_.fetch_add(n, std::memory_order_relaxed); }
    std::uint64_t value() const { return count_.load(std::memory_order_relaxed); }
    void reset() { count_.store(0, std::memory_order_relaxed); }

private:
    std::atomic<std::uint64_t> count_{0};
};

/// Matrix-free linear map R^cols -> R^rows.
///
/// Square symmetric operators (A = CᵀC, E = LᵀD²L) and rectangular factors
/// (C, L) share this type. Every call to apply() or apply_adjoint() bumps the
/// shared counter once. Copies share the counter, so the count follows the
/// operator, not the handle.
class LinearOperator {
public:
    /// Writes op(in) into out; out is pre-sized and may hold garbage.
    using ApplyFn = std::function<void(const Vector& in, Vector& out)>;

    LinearOperator() = default;
    LinearOperator(Index rows, Index cols, ApplyFn apply, ApplyFn adjoint, bool symmetric, std::string name = {});

    /// Square symmetric operator; the adjoint is the operator itself.
    static LinearOperator symmetric(Index n, ApplyFn apply, std::string name = {});

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    /// Dimension of a square operator.
    Index dim() const { return cols_; }
    bool is_symmetric() const { return symmetric_; }
    bool has_adjoint() const { return static_cast<bool>(adjoint_); }
    const std::string& name() const { return name_; }

    Vector apply(const Vector& v) const;
    void apply(const Vector& v, Vector& out) const;
    Vector apply_adjoint(const Vector& v) const;
    void apply_adjoint(const Vector& v, Vector& out) const;

    /// Uncounted application, for composing operators whose cost is booked
    /// on the composite's own counter.
    void apply_uncounted(const Vector& v, Vector& out) const;
    void apply_adjoint_uncounted(const Vector& v, Vector& out) const;

    std::uint64_t matvec_count() const { return counter_ ? counter_->value() : 0; }
    void reset_count() const
    {
        if (counter_) counter_->reset();
    }
    const std::shared_ptr<MatvecCounter>& counter() const { return counter_; }
    /// Rebinds the operator to an external counter (e.g. one E-counter shared
    /// by every E_k of an outer iteration).
    LinearOperator with_counter(std::shared_ptr<MatvecCounter> counter) const;

    /// Scales the operator by s (the adjoint follows).
    LinearOperator scaled(double s, std::string name = {}) const;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    ApplyFn apply_;
    ApplyFn adjoint_;
    bool symmetric_ = false;
    std::string name_;
    std::shared_ptr<MatvecCounter> counter_;
};

/// A + γE as one operator. One apply costs one A-matvec and one E-matvec,
/// booked on the bases' counters.
class ShiftedOperator {
public:
    ShiftedOperator(LinearOperator a, LinearOperator e, double shift);

    Index dim() const { return a_.dim(); }
    double shift() const { return shift_; }
    const LinearOperator& base_a() const { return a_; }
    const LinearOperator& base_e() const { return e_; }

    Vector apply(const Vector& v) const;
    void apply(const Vector& v, Vector& out) const;
    /// Also returns the two base images, for callers that cache A·v and E·v.
    void apply_parts(const Vector& v, Vector& av, Vector& ev, Vector& out) const;

    /// Same bases at another shift.
    ShiftedOperator at(double shift) const { return ShiftedOperator(a_, e_, shift); }

private:
    LinearOperator a_;
    LinearOperator e_;
    double shift_;
};

/// A = CᵀC. One apply is booked as a single A-matvec.
LinearOperator compose_normal(const LinearOperator& c);

/// Lᵀ diag(d)² L with every d_i in [0, 1].
LinearOperator compose_weighted_laplacian(const LinearOperator& l, const Vector& weights);

/// Lᵀ diag(d_new² − d_old²) L, the change between two weighted regularizers.
/// Costs the same as one weighted-Laplacian apply.
LinearOperator compose_weight_difference(const LinearOperator& l, const Vector& weights_new, const Vector& weights_old);

inline std::uint64_t matvec_count(const LinearOperator& op) { return op.matvec_count(); }

/// Largest singular value estimate of op (power iteration on opᵀop).
double estimate_norm2(const LinearOperator& op, int iterations = 20, double tol = 1e-3, std::uint64_t seed = 7);

} // namespace shiftrecycle
