// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "shiftrecycle/config.hpp"
#include "shiftrecycle/pipeline.hpp"
#include "shiftrecycle/problems.hpp"

namespace shiftrecycle::report {

/// report.csv: k,ell,lambda,matvecs_A,matvecs_E,baseline_A,baseline_E,relres,iters.
/// k is 0-based, ell 1-based. Deterministic text: '.' decimal, LF endings.
std::string report_csv(const RunReport& r);

/// ell,lambda,residual,seminorm,curvature[,baseline_residual,baseline_seminorm].
std::string lcurve_csv(const OuterRecord& rec);

/// Writes report.csv, lcurve_<k>.csv, recon_<k>.pgm, recon_<k>.f64,
/// phantom.pgm, phantom.f64, data.f64 and summary.txt into `dir` (created if
/// missing).
void write_artifacts(const std::string& dir, const problems::ProblemSpec& problem, const RunConfig& cfg,
                     const RunReport& r);

/// Plain-text summary (key: value lines).
std::string summary_text(const problems::ProblemSpec& problem, const RunConfig& cfg, const RunReport& r);

} // namespace shiftrecycle::report
