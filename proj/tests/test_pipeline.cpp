// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "oracle/oracle.hpp"
#include "shiftrecycle/lcurve.hpp"
#include "shiftrecycle/pipeline.hpp"

using namespace shiftrecycle;

namespace {

// Two line segments in log-log space joined by a smooth hinge at `corner`.
std::vector<LCurvePoint> hinge_curve(int m, int corner, double rounding)
{
    std::vector<LCurvePoint> pts(static_cast<std::size_t>(m));
    auto softplus = [rounding](double z) { return rounding * std::log1p(std::exp(z / rounding)); };
    for (int i = 0; i < m; ++i) {
        const double t = i - corner;
        pts[static_cast<std::size_t>(i)].lambda = std::pow(10.0, -4.0 + 0.3 * i);
        pts[static_cast<std::size_t>(i)].residual = std::exp(-2.0 + softplus(t));
        pts[static_cast<std::size_t>(i)].seminorm = std::exp(1.0 + softplus(-t));
    }
    return pts;
}

problems::ProblemSpec small_blur(std::uint64_t seed = 1)
{
    return problems::blur_problem(16, 0.005, seed);
}

RunConfig small_config()
{
    RunConfig c = defaults_for("blur");
    c.n = 16;
    c.m = 10;
    c.lambda_min = 1e-3;
    c.lambda_max = 10.0;
    c.partition = 7;
    c.i1 = 1;
    c.i2 = 5;
    c.istar = 5;
    c.jl = 7;
    c.jr = 9;
    c.lc = 8;
    c.ritz_i1 = 30;
    c.ritz_i2 = 20;
    c.ritz_local = 6;
    c.store_cap = 40;
    c.correction_maxit = 40;
    c.maxits = 6;
    return c;
}

} // namespace

TEST_CASE("curvature matches a centred-difference recomputation")
{
    const auto pts = hinge_curve(15, 6, 0.4);
    const std::vector<double> kappa = lcurve_curvature(pts);
    CHECK(std::isnan(kappa.front()));
    CHECK(std::isnan(kappa.back()));
    const double h = std::log(std::pow(10.0, 0.3));
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        auto xs = [&](std::size_t j) { return std::log(pts[j].residual); };
        auto ys = [&](std::size_t j) { return std::log(pts[j].seminorm); };
        const double xp = (xs(i + 1) - xs(i - 1)) / (2 * h), yp = (ys(i + 1) - ys(i - 1)) / (2 * h);
        const double xpp = (xs(i + 1) - 2 * xs(i) + xs(i - 1)) / (h * h);
        const double ypp = (ys(i + 1) - 2 * ys(i) + ys(i - 1)) / (h * h);
        const double want = (xp * ypp - yp * xpp) / std::pow(xp * xp + yp * yp, 1.5);
        CHECK(kappa[i] == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("corner of a synthetic L")
{
    for (int corner : {3, 6, 11}) {
        std::vector<double> kappa;
        CHECK(max_curvature_corner(hinge_curve(15, corner, 0.4), &kappa) == corner);
        CHECK(kappa.size() == 15);
    }
}

TEST_CASE("degenerate curves")
{
    std::vector<LCurvePoint> line(8);
    for (int i = 0; i < 8; ++i) line[static_cast<std::size_t>(i)] = {std::pow(10.0, i), std::exp(0.5 * i), std::exp(-0.5 * i)};
    CHECK_THROWS_AS(max_curvature_corner(line), DegenerateLCurve);

    auto pts = hinge_curve(10, 4, 0.4);
    pts[3].seminorm = 0.0;
    CHECK_THROWS_AS(max_curvature_corner(pts), DegenerateLCurve);

    CHECK_THROWS(max_curvature_corner(hinge_curve(4, 2, 0.4)));
}

TEST_CASE("update_weights")
{
    SUBCASE("a single strong edge gets zero weight")
    {
        Vector lx = Vector::Constant(20, 0.01);
        lx(7) = -5.0;
        const Vector w = update_weights(Vector::Ones(20), lx, 2.0);
        CHECK(w(7) == 0.0);
        CHECK(w(0) == doctest::Approx(1.0 - std::pow(0.01 / 5.0, 2.0)));
    }
    SUBCASE("a flat image leaves the weights unchanged")
    {
        bool changed = true;
        const Vector d = Vector::Constant(10, 0.5);
        const Vector w = update_weights(d, Vector::Zero(10), 2.0, &changed);
        CHECK_FALSE(changed);
        CHECK(w == d);
    }
    SUBCASE("random input against the elementwise formula")
    {
        const Vector d = (oracle::random_vector(50, 1).array().abs() / 4.0).min(1.0).matrix();
        const Vector lx = oracle::random_vector(50, 2);
        for (double p : {1.0, 2.0, 3.5}) {
            const Vector w = update_weights(d, lx, p);
            const double peak = d.cwiseProduct(lx).cwiseAbs().maxCoeff();
            for (Index i = 0; i < 50; ++i) {
                const double want = (1.0 - std::pow(std::abs(d(i) * lx(i)) / peak, p)) * d(i);
                CHECK(std::abs(w(i) - want) <= 1e-14);
                CHECK(w(i) <= d(i));
                CHECK(w(i) >= 0.0);
            }
        }
    }
}

TEST_CASE("stopping rule after three equal choices")
{
    const problems::ProblemSpec prob = small_blur();
    RunConfig cfg = small_config();
    RunHooks hooks;
    int calls = 0;
    hooks.corner_finder = [&calls](const std::vector<LCurvePoint>&, std::vector<double>*) -> Index {
        ++calls;
        return 4;
    };
    const RunReport r = run_outer(prob, cfg, hooks);
    CHECK(r.outer_iterations == 3);
    CHECK(r.stopped_by_rule);
    CHECK_FALSE(r.maxits_reached);
    CHECK(calls == 3);
    CHECK(r.rows.size() == 30);
    CHECK(r.lambda_history.size() == 3);
}

TEST_CASE("maxits is flagged when the choice keeps moving")
{
    const problems::ProblemSpec prob = small_blur();
    RunConfig cfg = small_config();
    cfg.maxits = 3;
    RunHooks hooks;
    int calls = 0;
    hooks.corner_finder = [&calls](const std::vector<LCurvePoint>&, std::vector<double>*) -> Index {
        return 2 + (calls++ % 2);
    };
    const RunReport r = run_outer(prob, cfg, hooks);
    CHECK(r.maxits_reached);
    CHECK_FALSE(r.stopped_by_rule);
    CHECK(r.outer_iterations == 3);
}

TEST_CASE("degenerate L-curve aborts the run")
{
    const problems::ProblemSpec prob = small_blur();
    RunHooks hooks;
    hooks.corner_finder = [](const std::vector<LCurvePoint>&, std::vector<double>*) -> Index {
        throw DegenerateLCurve("no corner: curve degenerate");
    };
    CHECK_THROWS_AS(run_outer(prob, small_config(), hooks), DegenerateLCurve);
}

TEST_CASE("invalid configuration is rejected")
{
    RunConfig cfg = small_config();
    cfg.jr = cfg.partition;
    CHECK_THROWS_AS(run_outer(small_blur(), cfg), ConfigError);
}

TEST_CASE("fixed regularizer: recycled and fresh solves agree")
{
    const problems::ProblemSpec prob = small_blur(2);
    RunConfig cfg = small_config();
    cfg.tol = 1e-12;
    cfg.maxits = 2;
    cfg.baseline = true;
    RunHooks hooks;
    hooks.freeze_weights = true;
    hooks.corner_finder = [](const std::vector<LCurvePoint>& p, std::vector<double>*) -> Index {
        return static_cast<Index>(p.size() / 2);
    };
    const RunReport r = run_outer(prob, cfg, hooks);
    REQUIRE(r.outer_iterations == 2);
    REQUIRE(r.unconverged.empty());
    std::uint64_t rec = 0, base = 0;
    for (const SystemRecord& row : r.rows) {
        if (row.k != 1) continue;
        rec += row.matvecs_a + row.matvecs_e;
        base += row.baseline_a + row.baseline_e;
        CHECK(row.relres <= 1e-12);
    }
    CHECK(rec <= base);
    for (std::size_t l = 0; l < r.last_solutions.size(); ++l) {
        CAPTURE(l);
        const Vector& x = r.last_solutions[l];
        const Vector& y = r.last_baseline[l];
        CHECK((x - y).norm() / y.norm() <= 1e-5);
    }
}

TEST_CASE("outer loop invariants on a small problem")
{
    const problems::ProblemSpec prob = small_blur(3);
    for (GuessMode mode : {GuessMode::Orth, GuessMode::Oblique, GuessMode::ObliqueTwoGroup}) {
        CAPTURE(to_string(mode));
        RunConfig cfg = small_config();
        cfg.guess_mode = mode;
        cfg.maxits = 4;
        std::vector<Vector> weights;
        const RunReport r = run_outer(prob, cfg);
        CHECK(r.unconverged.empty());
        for (const SystemRecord& row : r.rows) CHECK(row.relres <= cfg.tol);
        CHECK(r.weights.minCoeff() >= 0.0);
        CHECK(r.weights.maxCoeff() <= 1.0);
        for (const OuterRecord& o : r.outer) {
            CHECK(o.lcurve.size() == 10);
            CHECK(o.corner >= 1);
            CHECK(o.corner <= 8);
            CHECK(o.anchor_a == static_cast<std::uint64_t>(o.principal_size));
            CHECK(o.anchor_e == static_cast<std::uint64_t>(o.principal_size));
            if (o.k > 0) CHECK(o.correction_a <= static_cast<std::uint64_t>(cfg.correction_maxit) + 1);
        }
    }
}

TEST_CASE("weights follow the update chain and never increase")
{
    const problems::ProblemSpec prob = small_blur(4);
    RunConfig cfg = small_config();
    cfg.stable_window = 10;
    cfg.maxits = 3;
    std::vector<Vector> stars;
    RunHooks hooks;
    hooks.on_outer = [&](const OuterRecord& o) { stars.push_back(o.x_star); };
    const RunReport r = run_outer(prob, cfg, hooks);
    REQUIRE(r.maxits_reached);
    REQUIRE(stars.size() == 3);
    // Updates follow iterations 0 and 1; the last iteration is not followed by one.
    Vector d = Vector::Ones(prob.l.rows());
    for (int k = 0; k < 2; ++k) {
        Vector lx(prob.l.rows());
        prob.l.apply_uncounted(stars[static_cast<std::size_t>(k)], lx);
        const Vector next = update_weights(d, lx, cfg.p);
        CHECK((next.array() <= d.array()).all());
        d = next;
    }
    CHECK((r.weights - d).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("normal_rhs")
{
    const problems::ProblemSpec prob = small_blur();
    const Vector b = normal_rhs(prob);
    CHECK((b - prob.c.apply_adjoint(prob.d)).norm() <= 1e-15 * b.norm());
}
