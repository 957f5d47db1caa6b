// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shiftrecycle/problems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <utility>

#include "shiftrecycle/kernels.hpp"

namespace shiftrecycle::problems {

std::vector<double> gaussian_taps(int bandwidth, double sigma)
{
    if (bandwidth < 0) throw Error("gaussian_taps: negative bandwidth");
    std::vector<double> taps(static_cast<std::size_t>(2 * bandwidth + 1), 0.0);
    for (int t = -bandwidth; t <= bandwidth; ++t) {
        double v;
        if (sigma > 0.0)
            v = std::exp(-static_cast<double>(t * t) / (2.0 * sigma * sigma));
        else
            v = t == 0 ? 1.0 : 0.0;
        taps[static_cast<std::size_t>(t + bandwidth)] = v;
    }
    return taps;
}

LinearOperator make_blur(Index n, const BlurParams& params)
{
    if (n < 1) throw Error("make_blur: n must be positive");
    for (int bw : params.bandwidths)
        if (bw < 0 || bw >= n) throw Error("make_blur: bandwidth " + std::to_string(bw) + " must lie in [0, n)");
    struct Taps {
        std::vector<double> t;
        std::size_t h;
    };
    std::array<Taps, 4> taps;
    for (std::size_t i = 0; i < 4; ++i)
        taps[i] = {gaussian_taps(params.bandwidths[i], params.sigmas[i]), static_cast<std::size_t>(params.bandwidths[i])};

    const auto un = static_cast<std::size_t>(n);
    auto apply = [taps, un](const Vector& in, Vector& out) {
        const auto& k = kernels::active();
        Vector tmp(in.size()), term(in.size());
        out.setZero();
        for (std::size_t term_i = 0; term_i < 2; ++term_i) {
            const Taps& row = taps[2 * term_i];      // C_i^(1): acts along rows
            const Taps& col = taps[2 * term_i + 1];  // C_i^(2): acts along columns
            k.band_conv(col.t.data(), col.h, in.data(), tmp.data(), un, un, 1, un);
            k.band_conv(row.t.data(), row.h, tmp.data(), term.data(), un, un, un, 1);
            out += term;
        }
    };
    return LinearOperator::symmetric(n * n, std::move(apply), "blur");
}

void SparseMatrix::multiply(const Vector& x, Vector& y) const
{
    for (Index r = 0; r < rows; ++r) {
        double s = 0.0;
        for (Index p = row_ptr[static_cast<std::size_t>(r)]; p < row_ptr[static_cast<std::size_t>(r) + 1]; ++p)
            s += values[static_cast<std::size_t>(p)] * x[col_idx[static_cast<std::size_t>(p)]];
        y[r] = s;
    }
}

void SparseMatrix::multiply_transpose(const Vector& x, Vector& y) const
{
    y.setZero();
    for (Index r = 0; r < rows; ++r) {
        const double xr = x[r];
        if (xr == 0.0) continue;
        for (Index p = row_ptr[static_cast<std::size_t>(r)]; p < row_ptr[static_cast<std::size_t>(r) + 1]; ++p)
            y[col_idx[static_cast<std::size_t>(p)]] += values[static_cast<std::size_t>(p)] * xr;
    }
}

double SparseMatrix::frobenius_norm() const
{
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

Index radon_bins(Index n)
{
    Index bins = static_cast<Index>(std::ceil(std::numbers::sqrt2 * static_cast<double>(n) - 1e-12));
    if ((bins - n) % 2 != 0) ++bins;
    return bins;
}

SparseMatrix radon_matrix(Index n, const std::vector<double>& angles_deg)
{
    if (n < 2) throw Error("make_radon: n must be at least 2");
    const Index bins = radon_bins(n);
    SparseMatrix m;
    m.rows = bins * static_cast<Index>(angles_deg.size());
    m.cols = n * n;
    m.row_ptr.reserve(static_cast<std::size_t>(m.rows) + 1);
    m.row_ptr.push_back(0);

    const double half = 0.5 * static_cast<double>(n);
    constexpr double kParallel = 1e-12;
    std::vector<double> ts;
    std::vector<std::pair<Index, double>> hits;
    for (double deg : angles_deg) {
        const double th = deg * std::numbers::pi / 180.0;
        const double nx = std::cos(th), ny = std::sin(th);
        const double ux = -ny, uy = nx;
        for (Index j = 0; j < bins; ++j) {
            const double s = static_cast<double>(j) - 0.5 * static_cast<double>(bins - 1);
            const double px = s * nx, py = s * ny;
            // Slab intersection with [−n/2, n/2]².
            double t0 = -1e300, t1 = 1e300;
            bool miss = false;
            for (int axis = 0; axis < 2 && !miss; ++axis) {
                const double p = axis == 0 ? px : py;
                const double u = axis == 0 ? ux : uy;
                if (std::abs(u) < kParallel) {
                    if (p <= -half || p >= half) miss = true;
                    continue;
                }
                double a = (-half - p) / u, b = (half - p) / u;
                if (a > b) std::swap(a, b);
                t0 = std::max(t0, a);
                t1 = std::min(t1, b);
            }
            hits.clear();
            if (!miss && t1 > t0) {
                ts.clear();
                ts.push_back(t0);
                ts.push_back(t1);
                for (int axis = 0; axis < 2; ++axis) {
                    const double p = axis == 0 ? px : py;
                    const double u = axis == 0 ? ux : uy;
                    if (std::abs(u) < kParallel) continue;
                    for (Index k = 0; k <= n; ++k) {
                        const double t = (static_cast<double>(k) - half - p) / u;
                        if (t > t0 && t < t1) ts.push_back(t);
                    }
                }
                std::sort(ts.begin(), ts.end());
                for (std::size_t q = 0; q + 1 < ts.size(); ++q) {
                    const double len = ts[q + 1] - ts[q];
                    if (len <= 1e-12) continue;
                    const double tm = 0.5 * (ts[q] + ts[q + 1]);
                    const double x = px + tm * ux, y = py + tm * uy;
                    const Index col = std::clamp<Index>(static_cast<Index>(std::floor(x + half)), 0, n - 1);
                    const Index row = std::clamp<Index>(static_cast<Index>(std::floor(half - y)), 0, n - 1);
                    hits.emplace_back(row + n * col, len);
                }
                std::sort(hits.begin(), hits.end());
            }
            for (std::size_t q = 0; q < hits.size(); ++q) {
                if (!m.col_idx.empty() && static_cast<Index>(m.col_idx.size()) > m.row_ptr.back() &&
                    m.col_idx.back() == hits[q].first) {
                    m.values.back() += hits[q].second;
                    continue;
                }
                m.col_idx.push_back(hits[q].first);
                m.values.push_back(hits[q].second);
            }
            m.row_ptr.push_back(static_cast<Index>(m.col_idx.size()));
        }
    }
    return m;
}

LinearOperator make_radon(Index n, const std::vector<double>& angles_deg, bool normalize)
{
    auto m = std::make_shared<SparseMatrix>(radon_matrix(n, angles_deg));
    if (normalize) {
        const double f = m->frobenius_norm();
        if (f > 0.0)
            for (double& v : m->values) v /= f;
    }
    return LinearOperator(
        m->rows, m->cols, [m](const Vector& in, Vector& out) { m->multiply(in, out); },
        [m](const Vector& in, Vector& out) { m->multiply_transpose(in, out); }, false, "radon");
}

LinearOperator make_gradient(Index n)
{
    if (n < 1) throw Error("make_gradient: n must be positive");
    const Index h = n * (n - 1); // rows per direction
    auto apply = [n](const Vector& x, Vector& out) {
        Index r = 0;
        for (Index j = 0; j + 1 < n; ++j)
            for (Index i = 0; i < n; ++i) out[r++] = x[i + n * (j + 1)] - x[i + n * j];
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i + 1 < n; ++i) out[r++] = x[i + 1 + n * j] - x[i + n * j];
    };
    auto adjoint = [n](const Vector& y, Vector& out) {
        out.setZero();
        Index r = 0;
        for (Index j = 0; j + 1 < n; ++j)
            for (Index i = 0; i < n; ++i, ++r) {
                out[i + n * (j + 1)] += y[r];
                out[i + n * j] -= y[r];
            }
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i + 1 < n; ++i, ++r) {
                out[i + 1 + n * j] += y[r];
                out[i + n * j] -= y[r];
            }
    };
    return LinearOperator(2 * h, n * n, std::move(apply), std::move(adjoint), false, "gradient");
}

Vector add_noise(const Vector& clean, double level, std::uint64_t seed)
{
    if (level < 0.0) throw Error("add_noise: level must be nonnegative");
    if (level == 0.0) return clean;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Vector g(clean.size());
    for (Index i = 0; i < g.size(); ++i) g[i] = normal(rng);
    return clean + (level * clean.norm() / g.norm()) * g;
}

namespace {

struct Ellipse {
    double value, a, b, x0, y0, phi_deg;
};

Vector render(Index n, const std::vector<Ellipse>& shapes)
{
    Vector img = Vector::Zero(n * n);
    const double dn = static_cast<double>(n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            const double x = (2.0 * static_cast<double>(j) + 1.0) / dn - 1.0;
            const double y = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / dn;
            double v = 0.0;
            for (const Ellipse& e : shapes) {
                const double ph = e.phi_deg * std::numbers::pi / 180.0;
                const double xr = (x - e.x0) * std::cos(ph) + (y - e.y0) * std::sin(ph);
                const double yr = -(x - e.x0) * std::sin(ph) + (y - e.y0) * std::cos(ph);
                if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) v += e.value;
            }
            img[i + n * j] = v;
        }
    return img;
}

} // namespace

Vector geometric_phantom(Index n)
{
    Vector img = render(n, {{1.0, 0.32, 0.32, -0.35, 0.35, 0.0}});
    const double dn = static_cast<double>(n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            const double x = (2.0 * static_cast<double>(j) + 1.0) / dn - 1.0;
            const double y = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / dn;
            double& v = img[i + n * j];
            if (x > 0.1 && x < 0.75 && y > 0.15 && y < 0.7) v = 0.6;
            if (x > -0.7 && x < 0.6 && y > -0.62 && y < -0.38) v = 0.8;
            if (x > 0.25 && x < 0.5 && y > -0.25 && y < 0.05) v = 0.35;
        }
    return img;
}

Vector shepp_logan(Index n)
{
    return render(n, {
                         {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
                         {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
                         {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
                         {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
                         {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
                         {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
                         {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
                         {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
                         {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
                         {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
                     });
}

namespace {

void finish(ProblemSpec& p, std::uint64_t seed)
{
    const LinearOperator grad = make_gradient(p.n);
    p.l = grad.scaled(1.0 / estimate_norm2(grad), "L");
    Vector clean(p.c.rows());
    p.c.apply_uncounted(p.x_true, clean);
    p.d = add_noise(clean, p.noise_level, seed);
}

} // namespace

ProblemSpec blur_problem(Index n, double noise_level, std::uint64_t seed, const BlurParams& params)
{
    ProblemSpec p;
    p.name = "blur";
    p.kind = Kind::Blur;
    p.n = n;
    const LinearOperator raw = make_blur(n, params);
    p.c = raw.scaled(1.0 / estimate_norm2(raw), "C");
    p.x_true = geometric_phantom(n);
    p.noise_level = noise_level;
    finish(p, seed);
    return p;
}

ProblemSpec ct_problem(Index n, double noise_level, std::uint64_t seed)
{
    ProblemSpec p;
    p.name = "ct";
    p.kind = Kind::Ct;
    p.n = n;
    std::vector<double> angles;
    for (int a = 1; a <= 135; ++a) angles.push_back(static_cast<double>(a));
    p.c = make_radon(n, angles, true);
    p.x_true = shepp_logan(n);
    p.noise_level = noise_level;
    finish(p, seed);
    return p;
}

} // namespace shiftrecycle::problems
