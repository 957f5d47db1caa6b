// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "shiftrecycle/common.hpp"

namespace shiftrecycle {

struct LCurvePoint {
    double lambda = 0.0;
    double residual = 0.0;  // ‖Cx − d‖₂
    double seminorm = 0.0;  // ‖D_k L x‖₂
};

/// Raised when no corner can be located (collinear or non-finite points).
class DegenerateLCurve : public Error {
public:
    using Error::Error;
};

/// Picks a corner index (0-based) from points ordered by increasing λ.
/// Implementations may fill `curvature` with one value per point.
using CornerFinder = std::function<Index(const std::vector<LCurvePoint>& points, std::vector<double>* curvature)>;

/// Signed curvature of (log ρ, log η) parameterized by log λ, from three-point
/// finite differences on a possibly nonuniform grid. Endpoints get NaN.
std::vector<double> lcurve_curvature(const std::vector<LCurvePoint>& points);

/// argmax of the signed curvature over interior points. Needs at least five
/// points; throws DegenerateLCurve when the maximum is ≤ 1e-8.
Index max_curvature_corner(const std::vector<LCurvePoint>& points, std::vector<double>* curvature = nullptr);

} // namespace shiftrecycle
