// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shiftrecycle/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace shiftrecycle {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_int(const std::string& key, const std::string& v)
{
    T out{};
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("invalid integer for " + key + ": '" + v + "'");
    return out;
}

double parse_real(const std::string& key, const std::string& v)
{
    // strtod honours the C locale set at startup; '.' is the decimal point.
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(out))
        throw ConfigError("invalid number for " + key + ": '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("invalid boolean for " + key + ": '" + v + "'");
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string to_string(GuessMode mode)
{
    switch (mode) {
    case GuessMode::Orth: return "orth";
    case GuessMode::Oblique: return "oblique";
    case GuessMode::ObliqueTwoGroup: return "oblique-two-group";
    }
    return "orth";
}

std::vector<double> RunConfig::lambdas() const
{
    std::vector<double> out(static_cast<std::size_t>(std::max(m, 0)));
    const double a = std::log10(lambda_min), b = std::log10(lambda_max);
    for (int i = 0; i < m; ++i) {
        const double t = m > 1 ? static_cast<double>(i) / static_cast<double>(m - 1) : 0.0;
        out[static_cast<std::size_t>(i)] = std::pow(10.0, a + t * (b - a));
    }
    return out;
}

RunConfig defaults_for(const std::string& problem)
{
    RunConfig c;
    if (problem == "blur") return c;
    if (problem != "ct") throw ConfigError("unknown problem '" + problem + "' (expected blur or ct)");
    c.problem = "ct";
    c.noise = 0.01;
    c.lambda_max = 10.0;
    c.partition = 16;
    c.istar = 12;
    c.jl = 15;
    c.jr = 19;
    c.lc = 19;
    return c;
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = {
        "problem", "n", "noise", "seed", "M", "lambda-min", "lambda-max", "partition", "i1", "i2", "istar",
        "jl", "jr", "lc", "ritz-i1", "ritz-i2", "ritz-local", "store-cap", "correction-maxit", "inner-maxit",
        "tol", "p", "maxits", "stable-window", "duplicate-cos", "cond-cap", "guess-mode", "baseline", "out"};
    return keys;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw)
{
    const std::string v = trim(raw);
    if (key == "problem") {
        if (v != "blur" && v != "ct") throw ConfigError("unknown problem '" + v + "' (expected blur or ct)");
        c.problem = v;
    } else if (key == "n") c.n = parse_int<Index>(key, v);
    else if (key == "noise") c.noise = parse_real(key, v);
    else if (key == "seed") c.seed = parse_int<std::uint64_t>(key, v);
    else if (key == "M") c.m = parse_int<int>(key, v);
    else if (key == "lambda-min") c.lambda_min = parse_real(key, v);
    else if (key == "lambda-max") c.lambda_max = parse_real(key, v);
    else if (key == "partition") c.partition = parse_int<int>(key, v);
    else if (key == "i1") c.i1 = parse_int<int>(key, v);
    else if (key == "i2") c.i2 = parse_int<int>(key, v);
    else if (key == "istar") c.istar = parse_int<int>(key, v);
    else if (key == "jl") c.jl = parse_int<int>(key, v);
    else if (key == "jr") c.jr = parse_int<int>(key, v);
    else if (key == "lc") c.lc = parse_int<int>(key, v);
    else if (key == "ritz-i1") c.ritz_i1 = parse_int<int>(key, v);
    else if (key == "ritz-i2") c.ritz_i2 = parse_int<int>(key, v);
    else if (key == "ritz-local") c.ritz_local = parse_int<int>(key, v);
    else if (key == "store-cap") c.store_cap = parse_int<int>(key, v);
    else if (key == "correction-maxit") c.correction_maxit = parse_int<int>(key, v);
    else if (key == "inner-maxit") c.inner_maxit = parse_int<int>(key, v);
    else if (key == "tol") c.tol = parse_real(key, v);
    else if (key == "p") c.p = parse_real(key, v);
    else if (key == "maxits") c.maxits = parse_int<int>(key, v);
    else if (key == "stable-window") c.stable_window = parse_int<int>(key, v);
    else if (key == "duplicate-cos") c.duplicate_cos = parse_real(key, v);
    else if (key == "cond-cap") c.cond_cap = parse_real(key, v);
    else if (key == "guess-mode") {
        if (v == "orth") c.guess_mode = GuessMode::Orth;
        else if (v == "oblique") c.guess_mode = GuessMode::Oblique;
        else if (v == "oblique-two-group") c.guess_mode = GuessMode::ObliqueTwoGroup;
        else throw ConfigError("invalid guess-mode '" + v + "' (expected orth, oblique or oblique-two-group)");
    } else if (key == "baseline") c.baseline = parse_bool(key, v);
    else if (key == "out") c.out = v;
    else throw ConfigError("unknown key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

RunConfig build_config(const std::vector<std::pair<std::string, std::string>>& settings)
{
    std::string problem = "blur";
    for (const auto& [k, v] : settings)
        if (k == "problem") problem = trim(v);
    RunConfig c = defaults_for(problem);
    for (const auto& [k, v] : settings) apply_setting(c, k, v);
    return c;
}

Validation validate(const RunConfig& c)
{
    Validation r;
    auto bad = [&](const std::string& s) { r.violations.push_back(s); };
    if (c.problem != "blur" && c.problem != "ct") bad("problem must be blur or ct");
    if (c.n < 4) bad("n must be at least 4");
    if (c.problem == "blur") {
        for (int bw : {8, 7, 12, 4})
            if (bw >= c.n) {
                bad("blur bandwidth " + std::to_string(bw) + " must be smaller than n");
                break;
            }
    }
    if (c.noise < 0.0) bad("noise must be nonnegative");
    if (c.m < 5) bad("M must be at least 5 for L-curve corner selection");
    if (!(c.lambda_min > 0.0)) bad("lambda-min must be positive");
    if (!(c.lambda_min < c.lambda_max)) bad("lambda-min must be smaller than lambda-max");
    auto in_left = [&](int v, const char* name) {
        if (v < 1 || v > c.partition) bad(std::string(name) + " must lie in [1, partition]");
    };
    in_left(c.i1, "i1");
    in_left(c.i2, "i2");
    in_left(c.istar, "istar");
    in_left(c.jl, "jl");
    if (c.partition < 1 || c.partition >= c.m) bad("partition must lie in [1, M)");
    if (c.jr <= c.partition) bad("right anchor inside left group (jr must exceed partition)");
    if (c.jr > c.m) bad("jr must not exceed M");
    if (c.lc < 1 || c.lc > c.m) bad("lc must lie in [1, M]");
    if (c.i1 == c.i2) bad("i1 and i2 must differ");
    if (c.ritz_i1 < 0 || c.ritz_i2 < 0 || c.ritz_local < 0) bad("Ritz counts must be nonnegative");
    if (c.store_cap < std::max(c.ritz_i1, c.ritz_i2)) bad("store-cap must be at least the principal Ritz counts");
    if (c.correction_maxit < 1 || c.inner_maxit < 1) bad("iteration limits must be positive");
    if (!(c.tol > 0.0) || !(c.tol < 1.0)) bad("tol must lie in (0, 1)");
    if (!(c.p > 0.0)) bad("p must be positive");
    if (c.maxits < 1) bad("maxits must be positive");
    if (c.stable_window < 1) bad("stable-window must be positive");
    if (!(c.duplicate_cos > 0.0 && c.duplicate_cos <= 1.0)) bad("duplicate-cos must lie in (0, 1]");
    if (!(c.cond_cap > 1.0)) bad("cond-cap must exceed 1");

    auto note = [&](const std::string& s) { r.warnings.push_back(s); };
    const RunConfig published = defaults_for(c.problem == "ct" ? "ct" : "blur");
    const Index published_n = c.problem == "ct" ? 82 : 128;
    if (c.n != published_n) note("n = " + std::to_string(c.n) + " differs from the published size " + std::to_string(published_n));
    if (c.lc <= c.partition) note("lc lies in the left group; the published runs use a right-group shift");
    if (c.ritz_local > 12) note("ritz-local above 12 lets local spaces exceed 14 columns before truncation");
    note("p = " + fmt(c.p) + " is not given in the published method; 2 is a guess");
    const std::vector<std::string> keys = {"noise", "M", "lambda-min", "lambda-max", "partition", "i1", "i2",
                                           "istar", "jl", "jr", "lc", "ritz-i1", "ritz-i2", "ritz-local", "tol"};
    const std::string mine = to_text(c), ref = to_text(published);
    auto value_of = [](const std::string& text, const std::string& key) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line))
            if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
        return std::string();
    };
    for (const auto& k : keys)
        if (value_of(mine, k) != value_of(ref, k))
            note(k + " = " + value_of(mine, k) + " differs from the published value " + value_of(ref, k));
    return r;
}

std::string to_text(const RunConfig& c)
{
    std::ostringstream o;
    o << "problem=" << c.problem << '\n'
      << "n=" << c.n << '\n'
      << "noise=" << fmt(c.noise) << '\n'
      << "seed=" << c.seed << '\n'
      << "M=" << c.m << '\n'
      << "lambda-min=" << fmt(c.lambda_min) << '\n'
      << "lambda-max=" << fmt(c.lambda_max) << '\n'
      << "partition=" << c.partition << '\n'
      << "i1=" << c.i1 << '\n'
      << "i2=" << c.i2 << '\n'
      << "istar=" << c.istar << '\n'
      << "jl=" << c.jl << '\n'
      << "jr=" << c.jr << '\n'
      << "lc=" << c.lc << '\n'
      << "ritz-i1=" << c.ritz_i1 << '\n'
      << "ritz-i2=" << c.ritz_i2 << '\n'
      << "ritz-local=" << c.ritz_local << '\n'
      << "store-cap=" << c.store_cap << '\n'
      << "correction-maxit=" << c.correction_maxit << '\n'
      << "inner-maxit=" << c.inner_maxit << '\n'
      << "tol=" << fmt(c.tol) << '\n'
      << "p=" << fmt(c.p) << '\n'
      << "maxits=" << c.maxits << '\n'
      << "stable-window=" << c.stable_window << '\n'
      << "duplicate-cos=" << fmt(c.duplicate_cos) << '\n'
      << "cond-cap=" << fmt(c.cond_cap) << '\n'
      << "guess-mode=" << to_string(c.guess_mode) << '\n'
      << "baseline=" << (c.baseline ? "true" : "false") << '\n'
      << "out=" << c.out << '\n';
    return o.str();
}

} // namespace shiftrecycle
