// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shiftrecycle/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "shiftrecycle/minres.hpp"
#include "shiftrecycle/operators.hpp"
#include "shiftrecycle/recycle.hpp"
#include "shiftrecycle/rminres.hpp"

namespace shiftrecycle {

namespace {

constexpr int kMaxRestarts = 3;

double true_relres(const ShiftedOperator& op, const Vector& x, const Vector& b, double bnorm)
{
    const Index n = op.dim();
    Vector ax(n), ex(n);
    op.base_a().apply_uncounted(x, ax);
    op.base_e().apply_uncounted(x, ex);
    return (b - ax - op.shift() * ex).norm() / bnorm;
}

// Tops up x until the true residual meets tol. Restarts are counted solves
// on the explicit residual; the check itself is an uncounted measurement.
double refine(const ShiftedOperator& op, const Vector& b, double bnorm, double tol, int maxit, const RecycleFactor* rf,
              Vector& x, int& iters)
{
    double rel = true_relres(op, x, b, bnorm);
    for (int r = 0; r < kMaxRestarts && rel > tol; ++r) {
        const Vector res = b - op.apply(x);
        if (rf != nullptr) {
            RminresOptions ro;
            ro.target = 0.5 * tol * bnorm;
            ro.maxit = maxit;
            ro.ref_norm = bnorm;
            const RminresResult rr = rminres_solve(op, res, *rf, ro);
            x += rr.g;
            iters += rr.iterations;
        } else {
            MinresOptions mo;
            mo.tol = 0.5 * tol * bnorm / std::max(res.norm(), 1e-300);
            mo.maxit = maxit;
            const MinresResult mr = minres_solve(op, res, mo);
            x += mr.x;
            iters += mr.iterations;
        }
        rel = true_relres(op, x, b, bnorm);
    }
    return rel;
}

std::vector<LCurvePoint> lcurve_points(const problems::ProblemSpec& problem, const Vector& weights,
                                       const std::vector<double>& lambdas, const std::vector<Vector>& xs)
{
    std::vector<LCurvePoint> pts(xs.size());
    Vector cx(problem.c.rows()), lx(problem.l.rows());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        problem.c.apply_uncounted(xs[i], cx);
        problem.l.apply_uncounted(xs[i], lx);
        pts[i].lambda = lambdas[i];
        pts[i].residual = (cx - problem.d).norm();
        pts[i].seminorm = weights.cwiseProduct(lx).norm();
    }
    return pts;
}

} // namespace

Vector update_weights(const Vector& weights, const Vector& l_x, double p, bool* changed)
{
    if (weights.size() != l_x.size()) throw DimensionError("update_weights: length mismatch");
    const Vector mag = weights.cwiseProduct(l_x).cwiseAbs();
    const double peak = mag.size() ? mag.maxCoeff() : 0.0;
    if (changed) *changed = peak > 0.0;
    if (!(peak > 0.0)) {
        warn("update_weights: weighted gradient is zero; weights unchanged");
        return weights;
    }
    Vector out(weights.size());
    for (Index i = 0; i < out.size(); ++i)
        out[i] = std::clamp((1.0 - std::pow(mag[i] / peak, p)) * weights[i], 0.0, 1.0);
    return out;
}

Vector normal_rhs(const problems::ProblemSpec& problem)
{
    Vector b(problem.c.cols());
    problem.c.apply_adjoint_uncounted(problem.d, b);
    return b;
}

RunReport run_outer(const problems::ProblemSpec& problem, const RunConfig& cfg, const RunHooks& hooks)
{
    const auto t_start = std::chrono::steady_clock::now();
    const Validation v = validate(cfg);
    if (!v.ok()) {
        std::string msg = "invalid configuration:";
        for (const auto& s : v.violations) msg += "\n  " + s;
        throw ConfigError(msg);
    }

    const LinearOperator a = compose_normal(problem.c);
    const auto e_counter = std::make_shared<MatvecCounter>();
    const LinearOperator a_base = a.with_counter(std::make_shared<MatvecCounter>());
    const auto e_base_counter = std::make_shared<MatvecCounter>();
    const Vector b = normal_rhs(problem);
    const double bnorm = b.norm() > 0.0 ? b.norm() : 1.0;

    const int m = cfg.m;
    const std::vector<double> lambdas = cfg.lambdas();
    std::vector<double> gammas(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) gammas[i] = lambdas[i] * lambdas[i];
    const int i1 = cfg.i1 - 1, i2 = cfg.i2 - 1, istar = cfg.istar - 1;
    const int jl = cfg.jl - 1, jr = cfg.jr - 1, lc = cfg.lc - 1;
    const CornerFinder finder = hooks.corner_finder ? hooks.corner_finder : CornerFinder(max_curvature_corner);

    RunReport report;
    Vector d = Vector::Ones(problem.l.rows());
    Vector d_prev = d;
    std::vector<Vector> x_prev(static_cast<std::size_t>(m)), g_prev(static_cast<std::size_t>(m));
    RitzBundle v_i1;
    LocalSpaceOptions local_opts;
    local_opts.duplicate_cos = cfg.duplicate_cos;
    local_opts.max_columns = cfg.ritz_local + 2;

    for (int k = 0; k < cfg.maxits; ++k) {
        const LinearOperator e_k = compose_weighted_laplacian(problem.l, d).with_counter(e_counter);
        auto op_at = [&](int l) { return ShiftedOperator(a, e_k, gammas[static_cast<std::size_t>(l)]); };

        std::vector<std::uint64_t> ca(static_cast<std::size_t>(m), 0), ce(static_cast<std::size_t>(m), 0);
        auto charge = [&](int l, auto&& fn) {
            const std::uint64_t a0 = a.matvec_count(), e0 = e_counter->value();
            fn();
            ca[static_cast<std::size_t>(l)] += a.matvec_count() - a0;
            ce[static_cast<std::size_t>(l)] += e_counter->value() - e0;
        };

        std::vector<Vector> x(static_cast<std::size_t>(m)), g(static_cast<std::size_t>(m));
        std::vector<int> iters(static_cast<std::size_t>(m), 0);
        std::vector<double> guess_rel(static_cast<std::size_t>(m), 1.0), rel(static_cast<std::size_t>(m), 0.0);
        std::vector<bool> solved(static_cast<std::size_t>(m), false);
        OuterRecord rec;
        rec.k = k;

        Block raw;
        if (k == 0) {
            MinresOptions so;
            so.tol = cfg.tol;
            so.maxit = cfg.inner_maxit;
            so.store_cap = cfg.store_cap;
            RitzBundle v_i2;
            for (int which = 0; which < 2; ++which) {
                const int l = which == 0 ? i1 : i2;
                const auto sl = static_cast<std::size_t>(l);
                charge(l, [&] {
                    const ShiftedOperator op = op_at(l);
                    MinresResult r = minres_solve(op, b, so);
                    iters[sl] = r.iterations;
                    RitzBundle vb = extract_ritz(r.lanczos, op, which == 0 ? cfg.ritz_i1 : cfg.ritz_i2);
                    (which == 0 ? v_i1 : v_i2) = std::move(vb);
                    x[sl] = std::move(r.x);
                });
                solved[sl] = true;
            }
            raw = init_principal(x[static_cast<std::size_t>(i1)], x[static_cast<std::size_t>(i2)], v_i1, v_i2);
        } else {
            const LinearOperator change = compose_weight_difference(problem.l, d, d_prev).with_counter(e_counter);
            CorrectionSolve cs;
            charge(lc, [&] {
                cs = correction_system_solve(op_at(lc), change, x_prev[static_cast<std::size_t>(lc)],
                                             cfg.correction_maxit, cfg.tol);
            });
            rec.correction_a = ca[static_cast<std::size_t>(lc)];
            rec.correction_e = ce[static_cast<std::size_t>(lc)];
            rec.correction_iters = cs.iterations;
            raw = update_principal(v_i1, cs.v_new, x_prev);
        }

        const Block u_tilde = stabilize(raw, cfg.cond_cap);
        PrincipalSpace ps;
        {
            const std::uint64_t a0 = a.matvec_count(), e0 = e_counter->value();
            charge(istar, [&] { ps = anchor(u_tilde, op_at(istar), b); });
            rec.anchor_a = a.matvec_count() - a0;
            rec.anchor_e = e_counter->value() - e0;
        }
        rec.principal_size = ps.size();
        if (hooks.on_principal) hooks.on_principal(k, ps, a, e_k, b);
        std::optional<PrincipalSpace> ps_left, ps_right;
        if (cfg.guess_mode == GuessMode::ObliqueTwoGroup) {
            ps_left = reanchor(ps, gammas[static_cast<std::size_t>(jl)], b);
            ps_right = reanchor(ps, gammas[static_cast<std::size_t>(jr)], b);
        }

        std::optional<GroupSeed> seeds[2];
        for (int l = 0; l < m; ++l) {
            const auto sl = static_cast<std::size_t>(l);
            const ShiftedOperator op = op_at(l);
            if (solved[sl]) {
                charge(l, [&] { rel[sl] = refine(op, b, bnorm, cfg.tol, cfg.inner_maxit, nullptr, x[sl], iters[sl]); });
                continue;
            }
            const bool left = l < cfg.partition;
            InitialGuess ig;
            charge(l, [&] {
                switch (cfg.guess_mode) {
                case GuessMode::Orth: ig = initial_guess_orth(ps, op, b, l + 1); break;
                case GuessMode::Oblique: ig = initial_guess_oblique(ps, op, b, l + 1); break;
                case GuessMode::ObliqueTwoGroup:
                    ig = initial_guess_oblique(left ? *ps_left : *ps_right, op, b, l + 1);
                    break;
                }
            });
            guess_rel[sl] = ig.r0.norm() / bnorm;
            x[sl] = std::move(ig.x0);
            if (guess_rel[sl] <= cfg.tol) {
                charge(l, [&] { rel[sl] = refine(op, b, bnorm, cfg.tol, cfg.inner_maxit, nullptr, x[sl], iters[sl]); });
                continue;
            }

            auto& seed = seeds[left ? 0 : 1];
            if (!seed) {
                const int anchor_l = left ? jl : jr;
                charge(anchor_l, [&] {
                    seed = make_group_seed(ps, gammas[static_cast<std::size_t>(anchor_l)], cfg.ritz_local, a, e_k);
                });
            }
            charge(l, [&] {
                const Vector* outer_g = (k > 0 && g_prev[sl].size() > 0) ? &g_prev[sl] : nullptr;
                const Vector* shift_g = (l > 0 && g[sl - 1].size() > 0) ? &g[sl - 1] : nullptr;
                const LocalSpace local = update_local(l + 1, *seed, outer_g, shift_g, op, local_opts);
                RminresOptions ro;
                ro.target = cfg.tol * bnorm;
                ro.maxit = cfg.inner_maxit;
                ro.ref_norm = bnorm;
                const RminresResult rr = rminres_solve(op, ig.r0, local.factor, ro);
                const Vector x0 = x[sl];
                x[sl] += rr.g;
                iters[sl] = rr.iterations;
                rel[sl] = refine(op, b, bnorm, cfg.tol, cfg.inner_maxit, &local.factor, x[sl], iters[sl]);
                g[sl] = x[sl] - x0;
            });
        }

        rec.lcurve = lcurve_points(problem, d, lambdas, x);
        rec.corner = finder(rec.lcurve, &rec.curvature);
        rec.x_star = x[static_cast<std::size_t>(rec.corner)];

        std::vector<Vector> xb;
        std::vector<std::uint64_t> ba(static_cast<std::size_t>(m), 0), be(static_cast<std::size_t>(m), 0);
        std::vector<int> biters(static_cast<std::size_t>(m), 0);
        std::vector<double> brel(static_cast<std::size_t>(m), 0.0);
        if (cfg.baseline) {
            const LinearOperator e_base = e_k.with_counter(e_base_counter);
            xb.resize(static_cast<std::size_t>(m));
            for (int l = 0; l < m; ++l) {
                const auto sl = static_cast<std::size_t>(l);
                const ShiftedOperator op(a_base, e_base, gammas[sl]);
                const std::uint64_t a0 = a_base.matvec_count(), e0 = e_base_counter->value();
                MinresOptions mo;
                mo.tol = cfg.tol;
                mo.maxit = cfg.inner_maxit;
                MinresResult r = minres_solve(op, b, mo);
                xb[sl] = std::move(r.x);
                biters[sl] = r.iterations;
                brel[sl] = refine(op, b, bnorm, cfg.tol, cfg.inner_maxit, nullptr, xb[sl], biters[sl]);
                ba[sl] = a_base.matvec_count() - a0;
                be[sl] = e_base_counter->value() - e0;
            }
            rec.baseline_lcurve = lcurve_points(problem, d, lambdas, xb);
            rec.baseline_corner = finder(rec.baseline_lcurve, nullptr);
        }

        for (int l = 0; l < m; ++l) {
            const auto sl = static_cast<std::size_t>(l);
            SystemRecord row;
            row.k = k;
            row.ell = l + 1;
            row.lambda = lambdas[sl];
            row.matvecs_a = ca[sl];
            row.matvecs_e = ce[sl];
            row.baseline_a = ba[sl];
            row.baseline_e = be[sl];
            row.relres = rel[sl];
            row.baseline_relres = brel[sl];
            row.iters = iters[sl];
            row.baseline_iters = biters[sl];
            row.guess_relres = guess_rel[sl];
            row.converged = rel[sl] <= cfg.tol && (!cfg.baseline || brel[sl] <= cfg.tol);
            if (!row.converged) report.unconverged.emplace_back(k, l + 1);
            report.rows.push_back(row);
        }

        report.lambda_history.push_back(lambdas[static_cast<std::size_t>(rec.corner)]);
        report.outer_iterations = k + 1;
        if (hooks.on_outer) hooks.on_outer(rec);
        report.outer.push_back(rec);
        report.last_solutions = x;
        report.last_baseline = xb;

        const auto& hist = report.lambda_history;
        const auto w = static_cast<std::size_t>(cfg.stable_window);
        if (hist.size() >= w && std::all_of(hist.end() - static_cast<std::ptrdiff_t>(w), hist.end(),
                                            [&](double lam) { return lam == hist.back(); })) {
            report.stopped_by_rule = true;
            break;
        }
        if (k + 1 == cfg.maxits) {
            report.maxits_reached = true;
            break;
        }

        d_prev = d;
        if (!hooks.freeze_weights) {
            Vector lx(problem.l.rows());
            problem.l.apply_uncounted(rec.x_star, lx);
            d = update_weights(d, lx, cfg.p);
        }
        x_prev = std::move(x);
        g_prev = std::move(g);
    }

    report.weights = d;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

} // namespace shiftrecycle
