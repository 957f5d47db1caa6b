// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shiftrecycle/lcurve.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace shiftrecycle {

namespace {

constexpr double kFlatCurvature = 1e-8;

double safe_log(double v)
{
    if (!(v > 0.0) || !std::isfinite(v)) throw DegenerateLCurve("no corner: curve degenerate (nonpositive or non-finite norm)");
    return std::log(v);
}

} // namespace

std::vector<double> lcurve_curvature(const std::vector<LCurvePoint>& points)
{
    const std::size_t m = points.size();
    std::vector<double> t(m), x(m), y(m);
    for (std::size_t i = 0; i < m; ++i) {
        t[i] = safe_log(points[i].lambda);
        x[i] = safe_log(points[i].residual);
        y[i] = safe_log(points[i].seminorm);
    }
    std::vector<double> kappa(m, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double h1 = t[i] - t[i - 1];
        const double h2 = t[i + 1] - t[i];
        if (!(h1 > 0.0) || !(h2 > 0.0)) throw Error("lcurve: λ values must be strictly increasing");
        const double s = h1 + h2;
        const double c0 = -h2 / (h1 * s), c1 = (h2 - h1) / (h1 * h2), c2 = h1 / (h2 * s);
        const double d0 = 2.0 / (h1 * s), d1 = -2.0 / (h1 * h2), d2 = 2.0 / (h2 * s);
        const double xp = c0 * x[i - 1] + c1 * x[i] + c2 * x[i + 1];
        const double yp = c0 * y[i - 1] + c1 * y[i] + c2 * y[i + 1];
        const double xpp = d0 * x[i - 1] + d1 * x[i] + d2 * x[i + 1];
        const double ypp = d0 * y[i - 1] + d1 * y[i] + d2 * y[i + 1];
        const double speed2 = xp * xp + yp * yp;
        kappa[i] = speed2 > 0.0 ? (xp * ypp - yp * xpp) / std::pow(speed2, 1.5) : 0.0;
    }
    return kappa;
}

Index max_curvature_corner(const std::vector<LCurvePoint>& points, std::vector<double>* curvature)
{
    if (points.size() < 5) throw Error("lcurve: need at least 5 points, got " + std::to_string(points.size()));
    std::vector<double> kappa = lcurve_curvature(points);
    Index best = -1;
    double best_k = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < kappa.size(); ++i)
        if (kappa[i] > best_k) {
            best_k = kappa[i];
            best = static_cast<Index>(i);
        }
    if (curvature) *curvature = kappa;
    if (!(best_k > kFlatCurvature)) throw DegenerateLCurve("no corner: curve degenerate (max curvature " + std::to_string(best_k) + ")");
    return best;
}

} // namespace shiftrecycle
