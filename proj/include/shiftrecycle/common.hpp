// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace shiftrecycle {

using Vector = Eigen::VectorXd;
/// Column-major N×p block; columns are the basis vectors.
using Block = Eigen::MatrixXd;
using Index = Eigen::Index;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

inline std::span<const double> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
inline std::span<double> view(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

// Non-fatal diagnostics (fallbacks, clamps, dropped columns) go through a
// process-wide sink. The default writes to stderr.
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

} // namespace shiftrecycle
