// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oracle/oracle.hpp"
#include "shiftrecycle/config.hpp"
#include "shiftrecycle/imageio.hpp"
#include "shiftrecycle/report.hpp"

using namespace shiftrecycle;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "shiftrecycle-tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome run_cli(const std::string& args)
{
    static int counter = 0;
    const fs::path out = scratch("cli_out_" + std::to_string(counter));
    const fs::path err = scratch("cli_err_" + std::to_string(counter++));
    const std::string cmd = std::string("\"") + SHIFTRECYCLE_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = slurp(out);
    o.err = slurp(err);
    return o;
}

const char* kSmallRun = " --n 16 --M 10 --lambda-min 1e-3 --lambda-max 10 --partition 7 --i2 5 --istar 5 --jl 7 --jr 9"
                        " --lc 8 --ritz-i1 30 --ritz-i2 20 --ritz-local 6 --store-cap 40 --correction-maxit 40";

int count_lines(const std::string& s)
{
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

} // namespace

TEST_CASE("config text parsing")
{
    const auto kv = parse_config_text("# comment\nproblem = ct\n\n n=32 # trailing\nguess-mode=oblique\n");
    REQUIRE(kv.size() == 3);
    CHECK(kv[0].first == "problem");
    CHECK(kv[1].second == "32");
    const RunConfig c = build_config(kv);
    CHECK(c.problem == "ct");
    CHECK(c.partition == 16);
    CHECK(c.lc == 19);
    CHECK(c.noise == 0.01);
    CHECK(c.guess_mode == GuessMode::Oblique);

    CHECK_THROWS_AS(parse_config_text("novalue\n"), ConfigError);
    CHECK_THROWS_AS(build_config({{"bogus", "1"}}), ConfigError);
    CHECK_THROWS_AS(build_config({{"n", "abc"}}), ConfigError);
    CHECK_THROWS_AS(build_config({{"guess-mode", "sideways"}}), ConfigError);
    CHECK_THROWS_AS(build_config({{"problem", "mri"}}), ConfigError);
    CHECK_THROWS_AS(read_config_file(scratch("does-not-exist.cfg").string()), ConfigError);
}

TEST_CASE("config round trip through text")
{
    RunConfig c = defaults_for("blur");
    c.seed = 42;
    c.guess_mode = GuessMode::ObliqueTwoGroup;
    c.baseline = true;
    c.tol = 3e-7;
    const RunConfig back = build_config(parse_config_text(to_text(c)));
    CHECK(to_text(back) == to_text(c));
    for (const std::string& key : config_keys()) CHECK(to_text(c).find(key + "=") != std::string::npos);
}

TEST_CASE("lambda grid")
{
    const std::vector<double> l = defaults_for("blur").lambdas();
    REQUIRE(l.size() == 20);
    CHECK(l.front() == doctest::Approx(1e-4));
    CHECK(l.back() == doctest::Approx(std::pow(10.0, 2.5)));
    CHECK(l[1] / l[0] == doctest::Approx(l[19] / l[18]));
}

TEST_CASE("validation")
{
    SUBCASE("published defaults are valid")
    {
        CHECK(validate(defaults_for("blur")).ok());
        CHECK(validate(defaults_for("ct")).ok());
        CHECK_FALSE(validate(defaults_for("blur")).warnings.empty());
    }
    SUBCASE("right anchor inside the left group")
    {
        RunConfig c = defaults_for("blur");
        c.jr = c.partition;
        const Validation v = validate(c);
        REQUIRE_FALSE(v.ok());
        CHECK(v.violations.front().find("right anchor inside left group") != std::string::npos);
    }
    SUBCASE("empty lambda range")
    {
        RunConfig c = defaults_for("blur");
        c.lambda_max = c.lambda_min;
        CHECK_FALSE(validate(c).ok());
    }
    SUBCASE("indices out of range")
    {
        RunConfig c = defaults_for("ct");
        c.i2 = 17;
        c.lc = 21;
        CHECK(validate(c).violations.size() == 2);
    }
}

TEST_CASE("PGM round trip")
{
    const Index n = 5;
    Vector img(n * n);
    for (Index i = 0; i < img.size(); ++i) img(i) = 0.1 * static_cast<double>(i) - 0.5;
    const fs::path path = scratch("img.pgm");
    const io::PgmRange range = io::write_pgm16(path.string(), img, n);
    CHECK(range.min == doctest::Approx(-0.5));
    CHECK(range.max == doctest::Approx(1.9));
    const io::PgmImage back = io::read_pgm16(path.string());
    CHECK(back.width == n);
    CHECK(back.height == n);
    // Row-major samples from a column-major image.
    CHECK(back.samples[0] == 0);
    CHECK(back.samples[static_cast<std::size_t>(n * n - 1)] == 65535);
    CHECK(back.samples[1] == static_cast<std::uint16_t>(std::lround(5.0 / 24.0 * 65535.0)));
    const std::string bytes = slurp(path);
    CHECK(bytes.rfind("P5\n5 5\n65535\n", 0) == 0);

    const io::PgmRange flat = io::write_pgm16(scratch("flat.pgm").string(), Vector::Constant(4, 2.0), 2);
    CHECK(flat.min == flat.max);
    for (std::uint16_t s : io::read_pgm16(scratch("flat.pgm").string()).samples) CHECK(s == 0);
}

TEST_CASE("raw float64 round trip")
{
    const Vector img = oracle::random_vector(12, 3);
    const fs::path path = scratch("img.f64");
    io::write_image_f64(path.string(), Vector(img.head(9)), 3);
    const io::RawArray back = io::read_raw_f64(path.string());
    CHECK(back.rows == 3);
    CHECK(back.cols == 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(back.data[static_cast<std::size_t>(3 * i + j)] == img(i + 3 * j));
    const std::string bytes = slurp(path);
    CHECK(bytes.size() == 16 + 9 * 8);
    CHECK(bytes.substr(0, 8) == std::string(io::kRawMagic, 8));

    std::ofstream(scratch("bad.f64"), std::ios::binary) << "NOTMAGIC";
    CHECK_THROWS(io::read_raw_f64(scratch("bad.f64").string()));
}

TEST_CASE("report CSV layout")
{
    RunReport r;
    SystemRecord row;
    row.k = 1;
    row.ell = 3;
    row.lambda = 0.25;
    row.matvecs_a = 7;
    row.matvecs_e = 8;
    row.relres = 5e-7;
    row.iters = 6;
    r.rows.push_back(row);
    const std::string csv = report::report_csv(r);
    CHECK(csv.rfind("k,ell,lambda,matvecs_A,matvecs_E,baseline_A,baseline_E,relres,iters\n", 0) == 0);
    CHECK(csv.find("1,3,2.5000000000e-01,7,8,0,0,5.0000000000e-07,6\n") != std::string::npos);
    CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("cli: missing config file")
{
    const Outcome o = run_cli("run " + scratch("missing.cfg").string());
    CHECK(o.code == 1);
    CHECK(o.err.find("cannot read config file") != std::string::npos);
    CHECK(o.err.find("Usage") != std::string::npos);
}

TEST_CASE("cli: usage errors")
{
    CHECK(run_cli("").code == 1);
    CHECK(run_cli("run --no-such-flag 3").code == 1);
    CHECK(run_cli("run --n notanumber").code == 1);
}

TEST_CASE("cli: validate")
{
    const Outcome ok = run_cli("validate --problem ct");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("ok") != std::string::npos);
    const Outcome bad = run_cli("validate --jr 10");
    CHECK(bad.code == 1);
    CHECK(bad.out.find("right anchor inside left group") != std::string::npos);

    const fs::path cfg = scratch("ex.cfg");
    std::ofstream(cfg) << "# desk CT\nproblem=ct\nnoise=0.01\n";
    CHECK(run_cli("validate " + cfg.string()).code == 0);
}

TEST_CASE("cli: run writes deterministic artifacts")
{
    const fs::path d1 = scratch("run1"), d2 = scratch("run2");
    fs::remove_all(d1);
    fs::remove_all(d2);
    const Outcome a = run_cli(std::string("run --problem blur --baseline") + kSmallRun + " --maxits 3 --out " + d1.string());
    REQUIRE(a.code == 0);
    const Outcome b = run_cli(std::string("run --problem blur --baseline") + kSmallRun + " --maxits 3 --out " + d2.string());
    REQUIRE(b.code == 0);
    const std::string csv = slurp(d1 / "report.csv");
    CHECK(csv == slurp(d2 / "report.csv"));
    const int outer = count_lines(csv) - 1;
    CHECK(outer % 10 == 0);
    CHECK(outer >= 10);
    for (const char* f : {"summary.txt", "lcurve_0.csv", "recon_0.pgm", "recon_0.f64", "phantom.pgm", "phantom.f64", "data.f64"})
        CHECK(fs::exists(d1 / f));
    CHECK(slurp(d1 / "summary.txt").find("seed") != std::string::npos);
}

TEST_CASE("cli: default output directory from the environment")
{
    const fs::path root = scratch("envroot");
    fs::remove_all(root);
    const std::string cmd = "SHIFTRECYCLE_OUT=\"" + root.string() + "\" \"" + SHIFTRECYCLE_CLI_PATH + "\" run --seed 5" +
                            kSmallRun + " --maxits 1 >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(root / "blur-n16-seed5" / "report.csv"));
}

TEST_CASE("cli: unreachable tolerance exits with code 3")
{
    const Outcome o = run_cli(std::string("run --problem blur") + kSmallRun + " --maxits 1 --inner-maxit 1 --out " +
                              scratch("tol").string());
    CHECK(o.code == 3);
    CHECK(o.err.find("tolerance not reached") != std::string::npos);
}
