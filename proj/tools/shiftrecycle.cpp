// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

// Experiment runner.
//
//   shiftrecycle run [CONFIG] [--key value ...]
//   shiftrecycle validate [CONFIG] [--key value ...]
//
// Exit codes: 0 success, 1 usage or configuration error, 2 degenerate
// L-curve, 3 a system missed the residual tolerance.

#include <clocale>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "shiftrecycle/config.hpp"
#include "shiftrecycle/kernels.hpp"
#include "shiftrecycle/lcurve.hpp"
#include "shiftrecycle/pipeline.hpp"
#include "shiftrecycle/problems.hpp"
#include "shiftrecycle/report.hpp"

namespace sr = shiftrecycle;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitTolerance = 3;

struct Invocation {
    std::string config_path;
    std::map<std::string, std::string> overrides;
    bool baseline_flag = false;
};

void add_setting_flags(CLI::App* cmd, Invocation& inv)
{
    cmd->add_option("config", inv.config_path, "key=value configuration file");
    for (const std::string& key : sr::config_keys()) {
        if (key == "baseline") continue;
        cmd->add_option_function<std::string>(
            "--" + key, [&inv, key](const std::string& v) { inv.overrides[key] = v; }, "override '" + key + "'");
    }
    cmd->add_flag("--baseline", inv.baseline_flag, "also run fresh MINRES per system for comparison");
}

sr::RunConfig resolve(const Invocation& inv)
{
    std::vector<std::pair<std::string, std::string>> settings;
    if (!inv.config_path.empty()) settings = sr::read_config_file(inv.config_path);
    for (const auto& kv : inv.overrides) settings.emplace_back(kv.first, kv.second);
    if (inv.baseline_flag) settings.emplace_back("baseline", "true");
    return sr::build_config(settings);
}

std::string output_dir(const sr::RunConfig& cfg)
{
    if (!cfg.out.empty()) return cfg.out;
    const char* env = std::getenv("SHIFTRECYCLE_OUT");
    const std::filesystem::path root = env && *env ? env : "shiftrecycle-out";
    return (root / (cfg.problem + "-n" + std::to_string(cfg.n) + "-seed" + std::to_string(cfg.seed))).string();
}

int do_validate(const Invocation& inv)
{
    const sr::RunConfig cfg = resolve(inv);
    const sr::Validation v = sr::validate(cfg);
    for (const auto& w : v.warnings) std::cout << "warning: " << w << '\n';
    for (const auto& e : v.violations) std::cout << "violation: " << e << '\n';
    std::cout << (v.ok() ? "ok" : "invalid") << '\n';
    return v.ok() ? 0 : kExitUsage;
}

int do_run(const Invocation& inv)
{
    const sr::RunConfig cfg = resolve(inv);
    const sr::Validation v = sr::validate(cfg);
    if (!v.ok()) {
        for (const auto& e : v.violations) std::cerr << "violation: " << e << '\n';
        return kExitUsage;
    }
    std::cerr << "simd backend: " << sr::kernels::name(sr::kernels::active().backend) << '\n';
    const sr::problems::ProblemSpec problem = cfg.problem == "ct" ? sr::problems::ct_problem(cfg.n, cfg.noise, cfg.seed)
                                                                  : sr::problems::blur_problem(cfg.n, cfg.noise, cfg.seed);
    sr::RunHooks hooks;
    hooks.on_outer = [](const sr::OuterRecord& rec) {
        std::cerr << "outer " << rec.k << ": corner " << rec.corner + 1 << ", n_c " << rec.principal_size << '\n';
    };
    sr::RunReport r;
    try {
        r = sr::run_outer(problem, cfg, hooks);
    } catch (const sr::DegenerateLCurve& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDegenerate;
    }
    const std::string dir = output_dir(cfg);
    sr::report::write_artifacts(dir, problem, cfg, r);
    std::cout << "wrote " << dir << '\n';
    if (!r.unconverged.empty()) {
        std::cerr << "error: tolerance not reached for (k, ell):";
        for (const auto& [k, l] : r.unconverged) std::cerr << " (" << k << ", " << l << ')';
        std::cerr << '\n';
        return kExitTolerance;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    std::setlocale(LC_ALL, "C");
    sr::set_warning_sink([](const std::string& m) { std::cerr << "warning: " << m << '\n'; });

    CLI::App app{"Recycled Krylov solves for edge-preserving regularization"};
    app.require_subcommand(1);
    Invocation run_inv, validate_inv;
    CLI::App* run = app.add_subcommand("run", "run the outer iteration and write artifacts");
    add_setting_flags(run, run_inv);
    CLI::App* val = app.add_subcommand("validate", "check a configuration");
    add_setting_flags(val, validate_inv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run->parsed()) return do_run(run_inv);
        return do_validate(validate_inv);
    } catch (const sr::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
