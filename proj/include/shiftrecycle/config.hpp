// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Run configuration: flat key=value files whose keys match the CLI flag names
// (without the leading dashes). Shift indices are 1-based, as in the report.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "shiftrecycle/common.hpp"

namespace shiftrecycle {

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class GuessMode { Orth, Oblique, ObliqueTwoGroup };

std::string to_string(GuessMode mode);

struct RunConfig {
    std::string problem = "blur";
    Index n = 32;
    double noise = 0.005;
    std::uint64_t seed = 1;
    int m = 20;
    double lambda_min = 1e-4;
    double lambda_max = 316.22776601683796; // 10^2.5
    int partition = 15;
    int i1 = 1;
    int i2 = 10;
    int istar = 10;
    int jl = 15;
    int jr = 19;
    int lc = 18;
    int ritz_i1 = 100;
    int ritz_i2 = 50;
    int ritz_local = 12;
    int store_cap = 100;
    int correction_maxit = 100;
    int inner_maxit = 5000;
    double tol = 1e-6;
    double p = 2.0;
    int maxits = 30;
    int stable_window = 3;
    double duplicate_cos = 0.999;
    double cond_cap = 1e10;
    GuessMode guess_mode = GuessMode::Orth;
    bool baseline = false;
    std::string out;

    /// λ_ℓ for ℓ = 0..m−1, log-evenly spaced.
    std::vector<double> lambdas() const;
};

/// Published defaults for "blur" or "ct" at desk scale (n = 32).
RunConfig defaults_for(const std::string& problem);

/// Every recognized key, in the order used by to_text().
const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Throws ConfigError on an unknown key or
/// a malformed value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// key=value lines; '#' starts a comment; blank lines ignored.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Starts from defaults_for(the last "problem" setting, else "blur") and
/// applies every setting in order.
RunConfig build_config(const std::vector<std::pair<std::string, std::string>>& settings);

struct Validation {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
    bool ok() const { return violations.empty(); }
};

Validation validate(const RunConfig& cfg);

/// key=value dump, one per line, in config_keys() order.
std::string to_text(const RunConfig& cfg);

} // namespace shiftrecycle
