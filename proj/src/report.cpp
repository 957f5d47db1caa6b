// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shiftrecycle/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shiftrecycle/imageio.hpp"

namespace shiftrecycle::report {

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw Error("write failed: " + path.string());
}

} // namespace

std::string report_csv(const RunReport& r)
{
    std::ostringstream o;
    o << "k,ell,lambda,matvecs_A,matvecs_E,baseline_A,baseline_E,relres,iters\n";
    for (const SystemRecord& row : r.rows)
        o << row.k << ',' << row.ell << ',' << num(row.lambda) << ',' << row.matvecs_a << ',' << row.matvecs_e << ','
          << row.baseline_a << ',' << row.baseline_e << ',' << num(row.relres) << ',' << row.iters << '\n';
    return o.str();
}

std::string lcurve_csv(const OuterRecord& rec)
{
    std::ostringstream o;
    const bool base = !rec.baseline_lcurve.empty();
    o << "ell,lambda,residual,seminorm,curvature";
    if (base) o << ",baseline_residual,baseline_seminorm";
    o << '\n';
    for (std::size_t i = 0; i < rec.lcurve.size(); ++i) {
        const LCurvePoint& p = rec.lcurve[i];
        const double kappa = i < rec.curvature.size() ? rec.curvature[i] : 0.0;
        o << i + 1 << ',' << num(p.lambda) << ',' << num(p.residual) << ',' << num(p.seminorm) << ','
          << (std::isnan(kappa) ? std::string("nan") : num(kappa));
        if (base) o << ',' << num(rec.baseline_lcurve[i].residual) << ',' << num(rec.baseline_lcurve[i].seminorm);
        o << '\n';
    }
    return o.str();
}

std::string summary_text(const problems::ProblemSpec& problem, const RunConfig& cfg, const RunReport& r)
{
    std::ostringstream o;
    o << "problem: " << problem.name << '\n' << "n: " << problem.n << '\n';
    o << "outer_iterations: " << r.outer_iterations << '\n';
    o << "stopped_by_rule: " << (r.stopped_by_rule ? "true" : "false") << '\n';
    o << "maxits_reached: " << (r.maxits_reached ? "true" : "false") << '\n';
    o << "lambda_history:";
    for (double l : r.lambda_history) o << ' ' << num(l);
    o << '\n';
    o << "corner_history:";
    for (const OuterRecord& rec : r.outer) o << ' ' << rec.corner + 1;
    o << '\n';
    if (cfg.baseline) {
        o << "baseline_corner_history:";
        for (const OuterRecord& rec : r.outer) o << ' ' << rec.baseline_corner + 1;
        o << '\n';
    }
    o << "principal_size_history:";
    for (const OuterRecord& rec : r.outer) o << ' ' << rec.principal_size;
    o << '\n';
    std::uint64_t ra = 0, re = 0, ba = 0, be = 0;
    for (const SystemRecord& row : r.rows)
        if (row.k >= 1) {
            ra += row.matvecs_a;
            re += row.matvecs_e;
            ba += row.baseline_a;
            be += row.baseline_e;
        }
    o << "recycled_matvecs_k_ge_1: A=" << ra << " E=" << re << '\n';
    if (cfg.baseline) o << "baseline_matvecs_k_ge_1: A=" << ba << " E=" << be << '\n';
    o << "unconverged:";
    for (const auto& [k, l] : r.unconverged) o << " (" << k << ',' << l << ')';
    o << '\n';
    o << "wall_seconds: " << num(r.wall_seconds) << '\n';
    o << "# configuration\n" << to_text(cfg);
    return o.str();
}

void write_artifacts(const std::string& dir, const problems::ProblemSpec& problem, const RunConfig& cfg,
                     const RunReport& r)
{
    namespace fs = std::filesystem;
    const fs::path root(dir);
    fs::create_directories(root);
    write_text(root / "report.csv", report_csv(r));
    std::ostringstream ranges;
    const Index n = problem.n;
    for (const OuterRecord& rec : r.outer) {
        const std::string k = std::to_string(rec.k);
        write_text(root / ("lcurve_" + k + ".csv"), lcurve_csv(rec));
        const io::PgmRange pr = io::write_pgm16((root / ("recon_" + k + ".pgm")).string(), rec.x_star, n);
        io::write_image_f64((root / ("recon_" + k + ".f64")).string(), rec.x_star, n);
        ranges << "recon_" << k << "_range: " << num(pr.min) << ' ' << num(pr.max) << '\n';
    }
    const io::PgmRange ph = io::write_pgm16((root / "phantom.pgm").string(), problem.x_true, n);
    io::write_image_f64((root / "phantom.f64").string(), problem.x_true, n);
    io::write_raw_f64((root / "data.f64").string(), problem.d.data(), static_cast<std::uint32_t>(problem.d.size()), 1);
    ranges << "phantom_range: " << num(ph.min) << ' ' << num(ph.max) << '\n';
    write_text(root / "summary.txt", summary_text(problem, cfg, r) + "# image ranges\n" + ranges.str());
}

} // namespace shiftrecycle::report
