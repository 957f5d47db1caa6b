// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. `acceptance` runs every criterion; `acceptance N` runs
// criterion N only. Each criterion prints one PASS or FAIL line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "oracle/oracle.hpp"
#include "shiftrecycle/config.hpp"
#include "shiftrecycle/minres.hpp"
#include "shiftrecycle/pipeline.hpp"
#include "shiftrecycle/problems.hpp"
#include "shiftrecycle/recycle.hpp"
#include "shiftrecycle/report.hpp"
#include "shiftrecycle/rminres.hpp"

using namespace shiftrecycle;
using oracle::Matrix;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& s)
    {
        if (!detail.empty()) detail += "; ";
        detail += s;
    }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Pencil sizes cycle through 8..48.
Index pencil_size(int i) { return 8 + 5 * (i % 9); }

Verdict oracle_equivalence()
{
    Verdict v;
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const oracle::RandomPencil p = oracle::random_pencil(pencil_size(i), 100 + static_cast<std::uint64_t>(i));
        const oracle::GeneralizedSpectrum s = oracle::generalized_spectrum(p.a, p.e, p.b);
        for (double g : {0.0, 1e-4, 1.0, 1e4}) {
            const Vector want = oracle::dense_solve(p.a, p.e, g, p.b);
            worst = std::max(worst, (oracle::solution_via_spectrum(s, g) - want).norm() / want.norm());
        }
    }
    const double t = seconds_since(t0);
    v.require(worst <= 1e-8, "spectral solution error " + fmt("%.2e", worst));
    v.require(t < 10.0, "runtime " + fmt("%.1f s", t));
    v.note("max rel err " + fmt("%.2e", worst) + ", " + fmt("%.2f s", t));
    return v;
}

Verdict minres_correctness()
{
    Verdict v;
    const auto t0 = Clock::now();
    double worst = 0.0;
    bool monotone = true;
    for (int i = 0; i < 50; ++i) {
        const oracle::RandomPencil p = oracle::random_pencil(pencil_size(i), 200 + static_cast<std::uint64_t>(i), 1e-2);
        const Matrix s = p.a + 0.1 * p.e;
        MinresOptions mo;
        mo.tol = 1e-10;
        mo.maxit = 1000;
        const MinresResult r = minres_solve(oracle::from_dense(s, true), p.b, Vector::Zero(p.b.size()), mo);
        const Vector want = oracle::dense_solve(p.a, p.e, 0.1, p.b);
        worst = std::max(worst, (r.x - want).norm() / want.norm());
        for (std::size_t j = 1; j < r.relres.size(); ++j) monotone = monotone && r.relres[j] <= r.relres[j - 1] * (1 + 1e-12);
        v.require(r.converged, "system " + std::to_string(i) + " did not converge");
    }
    const double t = seconds_since(t0);
    v.require(worst <= 1e-8, "solution error " + fmt("%.2e", worst));
    v.require(monotone, "residual history not monotone");
    v.require(t < 10.0, "runtime " + fmt("%.1f s", t));
    v.note("max rel err " + fmt("%.2e", worst) + ", " + fmt("%.2f s", t));
    return v;
}

Verdict rminres_reduction()
{
    Verdict v;
    const auto t0 = Clock::now();
    // Empty recycle space against plain MINRES.
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const oracle::RandomPencil p = oracle::random_pencil(40, 300 + static_cast<std::uint64_t>(i), 1e-2);
        const LinearOperator a = oracle::from_dense(p.a, true), e = oracle::from_dense(p.e, true);
        const ShiftedOperator op(a, e, 0.5);
        for (int steps : {1, 5, 15, 30}) {
            RminresOptions ro;
            ro.maxit = steps;
            const RminresResult r = rminres_solve(op, p.b, RecycleFactor::empty(40), ro);
            MinresOptions mo;
            mo.tol = 1e-300;
            mo.maxit = steps;
            const MinresResult m = minres_solve(op, p.b, mo);
            worst = std::max(worst, (r.g - m.x).norm() / m.x.norm());
        }
    }
    v.require(worst <= 1e-10, "empty-space iterates differ by " + fmt("%.2e", worst));

    // Four isolated small eigenvalues, deflated by their eigenvectors.
    const Index n = 48;
    const Matrix q = oracle::random_orthonormal(n, n, 310);
    Vector lam(n);
    for (Index i = 0; i < 4; ++i) lam(i) = 1e-4 * static_cast<double>(i + 1);
    for (Index i = 4; i < n; ++i) lam(i) = 0.1 + 0.9 * static_cast<double>(i - 4) / static_cast<double>(n - 5);
    const Matrix ad = q * lam.asDiagonal() * q.transpose();
    const LinearOperator a = oracle::from_dense(0.5 * (ad + ad.transpose()), true);
    const LinearOperator e = oracle::from_dense(Matrix::Zero(n, n), true);
    const ShiftedOperator op(a, e, 0.0);
    const Vector rhs = oracle::random_vector(n, 311);
    RminresOptions ro;
    ro.target = 1e-8 * rhs.norm();
    ro.maxit = 1000;
    const RminresResult plain = rminres_solve(op, rhs, RecycleFactor::empty(n), ro);
    const RminresResult defl = rminres_solve(op, rhs, build_recycle_factor(op, q.leftCols(4)), ro);
    const double drop = 1.0 - static_cast<double>(defl.iterations) / static_cast<double>(plain.iterations);
    v.require(plain.converged && defl.converged, "solves did not converge");
    v.require(drop >= 0.25, "iteration drop " + fmt("%.0f%%", 100 * drop));
    const double t = seconds_since(t0);
    v.require(t < 10.0, "runtime " + fmt("%.1f s", t));
    v.note("empty-space diff " + fmt("%.1e", worst) + ", iterations " + std::to_string(plain.iterations) + " -> " +
           std::to_string(defl.iterations) + " (" + fmt("%.0f%% fewer", 100 * drop) + ")");
    return v;
}

Verdict guess_optimality()
{
    Verdict v;
    const auto t0 = Clock::now();
    double ls_err = 0.0, cs_err = 0.0;
    bool dominated = true;
    for (int i = 0; i < 30; ++i) {
        const Index n = 16 + (i % 5) * 8;
        const Index p = 3 + i % 6;
        oracle::RandomPencil pen = oracle::random_pencil(n, 400 + static_cast<std::uint64_t>(i), 1e-2);
        pen.b.normalize();
        const LinearOperator a = oracle::from_dense(pen.a, true), e = oracle::from_dense(pen.e, true);
        const double gstar = 0.3;
        const PrincipalSpace ps = anchor(oracle::random_orthonormal(n, p, 500 + static_cast<std::uint64_t>(i)),
                                         ShiftedOperator(a, e, gstar), pen.b);
        Matrix u(n, ps.size());
        for (Index j = 0; j < ps.size(); ++j) u.col(j) = ps.apply_u(Vector::Unit(ps.size(), j));
        const double shift = std::pow(10.0, static_cast<double>(i % 7) - 3.0);
        const ShiftedOperator op(a, e, shift);
        const InitialGuess go = initial_guess_orth(ps, op, pen.b);
        const InitialGuess gb = initial_guess_oblique(ps, op, pen.b);
        const double best = oracle::min_residual_over(pen.a + shift * pen.e, u, pen.b);
        ls_err = std::max(ls_err, std::abs(go.r0.norm() - best));
        dominated = dominated && go.r0.norm() <= gb.r0.norm() * (1 + 1e-12);
        const oracle::CsAnalysis cs = oracle::cs_analysis(ps.k, ps.eu, shift - gstar, pen.b);
        cs_err = std::max(cs_err, std::abs(gb.r0.squaredNorm() - go.r0.squaredNorm() - cs.gap_norm * cs.gap_norm));
    }
    const double t = seconds_since(t0);
    v.require(ls_err <= 1e-9, "orthogonal guess misses the LS minimum by " + fmt("%.2e", ls_err));
    v.require(dominated, "oblique residual below orthogonal residual");
    v.require(cs_err <= 1e-10, "CS identity off by " + fmt("%.2e", cs_err));
    v.require(t < 10.0, "runtime " + fmt("%.1f s", t));
    v.note("LS gap " + fmt("%.1e", ls_err) + ", CS gap " + fmt("%.1e", cs_err) + ", " + fmt("%.2f s", t));
    return v;
}

Verdict seeding_analysis()
{
    Verdict v;
    const RunConfig cfg = defaults_for("blur");
    const problems::ProblemSpec prob = problems::blur_problem(cfg.n, cfg.noise, cfg.seed);
    const LinearOperator a = compose_normal(prob.c);
    const LinearOperator e = compose_weighted_laplacian(prob.l, Vector::Ones(prob.l.rows()));
    const Vector b = normal_rhs(prob);
    const std::vector<double> lam = cfg.lambdas();
    auto gamma = [&](int l1) { return lam[static_cast<std::size_t>(l1 - 1)] * lam[static_cast<std::size_t>(l1 - 1)]; };

    // Outer iteration 0: two seed solves, their Ritz vectors, stabilize, anchor.
    MinresOptions so;
    so.tol = cfg.tol;
    so.maxit = cfg.inner_maxit;
    so.store_cap = cfg.store_cap;
    const ShiftedOperator op1(a, e, gamma(cfg.i1)), op2(a, e, gamma(cfg.i2));
    const MinresResult s1 = minres_solve(op1, b, so);
    const MinresResult s2 = minres_solve(op2, b, so);
    const RitzBundle v1 = extract_ritz(s1.lanczos, op1, cfg.ritz_i1);
    const RitzBundle v2 = extract_ritz(s2.lanczos, op2, cfg.ritz_i2);
    const Block ut = stabilize(init_principal(s1.x, s2.x, v1, v2), cfg.cond_cap);
    const PrincipalSpace ps = anchor(ut, ShiftedOperator(a, e, gamma(cfg.istar)), b);

    double worst_mid = 0.0;
    for (int l = cfg.i1 + 1; l < cfg.i2; ++l)
        worst_mid = std::max(worst_mid, initial_guess_orth(ps, ShiftedOperator(a, e, gamma(l)), b, l).r0.norm() / b.norm());
    v.require(worst_mid <= 0.1, "intermediate guess relres " + fmt("%.3f", worst_mid));

    // Two-group oblique guesses against the orthogonal optimum at the sixth
    // outer iteration of a run in oblique-two-group mode.
    RunConfig run = cfg;
    run.guess_mode = GuessMode::ObliqueTwoGroup;
    run.maxits = 6;
    run.stable_window = run.maxits + 1;
    const int figure_k = 5;
    double worst_left = 0.0, worst_right = 0.0;
    int right_better_on_right = 0, right_count = 0;
    bool seen = false;
    RunHooks hooks;
    hooks.on_principal = [&](int k, const PrincipalSpace& pk, const LinearOperator& ak, const LinearOperator& ek,
                             const Vector& bk) {
        if (k != figure_k) return;
        seen = true;
        const LinearOperator aq = ak.with_counter(std::make_shared<MatvecCounter>());
        const LinearOperator eq = ek.with_counter(std::make_shared<MatvecCounter>());
        const PrincipalSpace left = reanchor(pk, gamma(run.jl), bk);
        const PrincipalSpace right = reanchor(pk, gamma(run.jr), bk);
        for (int l = 1; l <= run.m; ++l) {
            if (l == run.partition + 1) continue; // boundary shift, between the two anchors
            const ShiftedOperator op(aq, eq, gamma(l));
            const double opt = initial_guess_orth(pk, op, bk, l).r0.norm();
            const double small = initial_guess_oblique(left, op, bk, l).r0.norm();
            const double large = initial_guess_oblique(right, op, bk, l).r0.norm();
            if (std::getenv("ACCEPTANCE_TRACE")) std::printf("  l=%2d opt %.3e small %.3e large %.3e\n", l, opt / bk.norm(), small / bk.norm(), large / bk.norm());
            if (l <= run.partition) {
                worst_left = std::max(worst_left, small / opt);
            } else {
                worst_right = std::max(worst_right, large / opt);
                ++right_count;
                if (large <= small) ++right_better_on_right;
            }
        }
    };
    run_outer(prob, run, hooks);
    v.require(seen, "run stopped before the sixth outer iteration");
    v.require(worst_left <= 2.0, "small-shift anchor ratio " + fmt("%.2f", worst_left) + " left of the partition");
    v.require(worst_right <= 2.0, "large-shift anchor ratio " + fmt("%.2f", worst_right) + " right of the partition");
    v.note("n_c " + std::to_string(ps.size()) + ", max intermediate relres " + fmt("%.2e", worst_mid) +
           ", k=6 oblique/optimal left " + fmt("%.3f", worst_left) + ", right " + fmt("%.3f", worst_right) +
           ", large anchor wins " + std::to_string(right_better_on_right) + "/" + std::to_string(right_count) + " on the right");
    return v;
}

Verdict end_to_end(const std::string& problem)
{
    Verdict v;
    RunConfig cfg = defaults_for(problem);
    cfg.baseline = true;
    const problems::ProblemSpec prob = problem == "ct" ? problems::ct_problem(cfg.n, cfg.noise, cfg.seed)
                                                       : problems::blur_problem(cfg.n, cfg.noise, cfg.seed);
    const auto t0 = Clock::now();
    const RunReport r = run_outer(prob, cfg);
    const double t = seconds_since(t0);

    double worst = 0.0;
    std::uint64_t rec = 0, base = 0;
    for (const SystemRecord& row : r.rows) {
        worst = std::max({worst, row.relres, row.baseline_relres});
        if (row.k >= 1) {
            rec += row.matvecs_a + row.matvecs_e;
            base += row.baseline_a + row.baseline_e;
        }
    }
    std::string mismatches;
    for (const OuterRecord& o : r.outer)
        if (o.corner != o.baseline_corner)
            mismatches += (mismatches.empty() ? "" : " ") + std::string("k=") + std::to_string(o.k) + ":" +
                          std::to_string(o.corner + 1) + "/" + std::to_string(o.baseline_corner + 1);
    const double ratio = base > 0 ? static_cast<double>(rec) / static_cast<double>(base) : 1.0;

    v.require(worst <= cfg.tol, "max relres " + fmt("%.2e", worst));
    v.require(r.stopped_by_rule && r.outer_iterations <= 30, "stopping rule not met within 30 iterations");
    v.require(base > 0 && ratio <= 0.6, "matvec ratio " + fmt("%.3f", ratio));
    v.require(mismatches.empty(), "corner mismatch (recycled/baseline, 1-based) " + mismatches);
    v.require(t < 300.0, "runtime " + fmt("%.0f s", t));
    v.note(std::to_string(r.outer_iterations) + " outer iterations, matvecs k>=1 " + std::to_string(rec) + " vs " +
           std::to_string(base) + " (ratio " + fmt("%.3f", ratio) + "), max relres " + fmt("%.2e", worst) + ", " +
           fmt("%.1f s", t));
    return v;
}

Verdict weight_semantics()
{
    Verdict v;
    RunConfig cfg = defaults_for("blur");
    cfg.maxits = 2;
    const problems::ProblemSpec prob = problems::blur_problem(cfg.n, cfg.noise, cfg.seed);
    // With maxits = 2 the reported weights are d after the first update.
    const RunReport r = run_outer(prob, cfg);
    const Vector& w = r.weights;
    const Index n = prob.n;

    Vector true_grad(prob.l.rows()), grad(prob.l.rows());
    prob.l.apply_uncounted(prob.x_true, true_grad);
    prob.l.apply_uncounted(r.outer.front().x_star, grad);

    // Endpoints (pixel indices) of every gradient row, in make_gradient order.
    std::vector<std::pair<Index, Index>> ends;
    for (Index j = 0; j + 1 < n; ++j)
        for (Index i = 0; i < n; ++i) ends.emplace_back(i + n * j, i + n * (j + 1));
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i + 1 < n; ++i) ends.emplace_back(i + n * j, i + 1 + n * j);

    std::vector<Index> edges;
    std::vector<bool> edge_pixel(static_cast<std::size_t>(n * n), false);
    for (Index r0 = 0; r0 < true_grad.size(); ++r0)
        if (std::abs(true_grad(r0)) > 1e-12) {
            edges.push_back(r0);
            edge_pixel[static_cast<std::size_t>(ends[static_cast<std::size_t>(r0)].first)] = true;
            edge_pixel[static_cast<std::size_t>(ends[static_cast<std::size_t>(r0)].second)] = true;
        }
    std::sort(edges.begin(), edges.end(), [&](Index x, Index y) { return std::abs(grad(x)) > std::abs(grad(y)); });
    double worst_edge = 0.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(10, edges.size()); ++i) worst_edge = std::max(worst_edge, w(edges[i]));

    auto far_from_edges = [&](Index p) {
        const Index pi = p % n, pj = p / n;
        for (Index dj = -2; dj <= 2; ++dj)
            for (Index di = -2; di <= 2; ++di) {
                const Index qi = pi + di, qj = pj + dj;
                if (qi < 0 || qj < 0 || qi >= n || qj >= n) continue;
                if (edge_pixel[static_cast<std::size_t>(qi + n * qj)]) return false;
            }
        return true;
    };
    double worst_interior = 1.0;
    int interior = 0;
    for (Index r0 = 0; r0 < w.size(); ++r0) {
        const auto [p, q] = ends[static_cast<std::size_t>(r0)];
        if (!far_from_edges(p) || !far_from_edges(q)) continue;
        ++interior;
        worst_interior = std::min(worst_interior, w(r0));
    }
    v.require(worst_edge < 0.05, "largest weight among the top-10 edges " + fmt("%.3f", worst_edge));
    v.require(interior > 0 && worst_interior > 0.9, "smallest interior weight " + fmt("%.3f", worst_interior));
    v.note("top-10 edge max weight " + fmt("%.4f", worst_edge) + ", interior min weight " + fmt("%.4f", worst_interior) +
           " over " + std::to_string(interior) + " interior differences");
    return v;
}

Verdict determinism()
{
    Verdict v;
    RunConfig cfg = defaults_for("blur");
    cfg.maxits = 4;
    auto once = [&] {
        const problems::ProblemSpec prob = problems::blur_problem(cfg.n, cfg.noise, cfg.seed);
        return report::report_csv(run_outer(prob, cfg));
    };
    const std::string a = once(), b = once();
    v.require(a == b, "report.csv differs between runs");
    v.note(std::to_string(a.size()) + " bytes identical");
    return v;
}

Verdict matvec_accounting()
{
    Verdict v;
    RunConfig cfg = defaults_for("blur");
    cfg.maxits = 3;
    cfg.stable_window = 10;
    const problems::ProblemSpec prob = problems::blur_problem(cfg.n, cfg.noise, cfg.seed);
    const RunReport r = run_outer(prob, cfg);
    std::uint64_t worst_corr = 0;
    for (const OuterRecord& o : r.outer) {
        const auto nc = static_cast<std::uint64_t>(o.principal_size);
        v.require(o.anchor_a == nc && o.anchor_e == nc,
                  "k=" + std::to_string(o.k) + " anchoring cost " + std::to_string(o.anchor_a) + "/" +
                      std::to_string(o.anchor_e) + " for n_c " + std::to_string(nc));
        if (o.k >= 1) {
            worst_corr = std::max({worst_corr, o.correction_a, o.correction_e});
            v.require(o.correction_a <= 101 && o.correction_e <= 101,
                      "k=" + std::to_string(o.k) + " correction cost " + std::to_string(o.correction_a) + "/" +
                          std::to_string(o.correction_e));
        }
    }
    std::string sizes;
    for (const OuterRecord& o : r.outer) sizes += (sizes.empty() ? "" : ",") + std::to_string(o.principal_size);
    v.note("n_c per k " + sizes + ", max correction matvecs " + std::to_string(worst_corr));
    return v;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
};

} // namespace

int main(int argc, char** argv)
{
    set_warning_sink([](const std::string&) {});
    const std::vector<Criterion> all = {
        {1, "oracle equivalence", oracle_equivalence},
        {2, "MINRES correctness", minres_correctness},
        {3, "RMINRES reduction and dominance", rminres_reduction},
        {4, "initial-guess optimality", guess_optimality},
        {5, "seeding analysis", seeding_analysis},
        {6, "end-to-end desk blur", [] { return end_to_end("blur"); }},
        {7, "end-to-end desk CT", [] { return end_to_end("ct"); }},
        {8, "weight-update semantics", weight_semantics},
        {9, "determinism", determinism},
        {10, "matvec accounting", matvec_accounting},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    int failures = 0;
    for (const Criterion& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2d %-32s %s  (%s)\n", c.id, c.name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
        failures += v.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
