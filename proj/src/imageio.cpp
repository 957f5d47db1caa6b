// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shiftrecycle/imageio.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace shiftrecycle::io {

namespace {

std::ofstream open_out(const std::string& path)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + path + " for writing");
    return f;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    return f;
}

void put_le32(std::ostream& f, std::uint32_t v)
{
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_le32(const unsigned char* b)
{
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void put_le64(std::ostream& f, double d)
{
    std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    f.write(reinterpret_cast<const char*>(b), 8);
}

// Reads the next whitespace-delimited header token, skipping comments.
std::string token(std::istream& f)
{
    std::string t;
    int c;
    while ((c = f.get()) != EOF) {
        if (c == '#') {
            while ((c = f.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!t.empty()) break;
            continue;
        }
        t.push_back(static_cast<char>(c));
    }
    return t;
}

} // namespace

PgmRange write_pgm16(const std::string& path, const Vector& image, Index n)
{
    if (image.size() != n * n) throw DimensionError("write_pgm16: image is not n×n");
    PgmRange range{image.size() ? image.minCoeff() : 0.0, image.size() ? image.maxCoeff() : 0.0};
    const double span = range.max - range.min;
    auto f = open_out(path);
    f << "P5\n" << n << ' ' << n << "\n65535\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(2 * n));
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            double t = span > 0.0 ? (image[i + n * j] - range.min) / span : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const auto v = static_cast<std::uint16_t>(std::lround(t * 65535.0));
            row[static_cast<std::size_t>(2 * j)] = static_cast<unsigned char>(v >> 8);
            row[static_cast<std::size_t>(2 * j + 1)] = static_cast<unsigned char>(v & 0xff);
        }
        f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!f) throw Error("write failed: " + path);
    return range;
}

PgmImage read_pgm16(const std::string& path)
{
    auto f = open_in(path);
    if (token(f) != "P5") throw Error(path + ": not a binary PGM");
    PgmImage img;
    img.width = std::stol(token(f));
    img.height = std::stol(token(f));
    if (std::stol(token(f)) != 65535) throw Error(path + ": expected maxval 65535");
    const auto count = static_cast<std::size_t>(img.width * img.height);
    std::vector<unsigned char> raw(2 * count);
    f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(f.gcount()) != raw.size()) throw Error(path + ": truncated samples");
    img.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        img.samples[i] = static_cast<std::uint16_t>(raw[2 * i] << 8 | raw[2 * i + 1]);
    return img;
}

void write_raw_f64(const std::string& path, const double* data, std::uint32_t rows, std::uint32_t cols)
{
    auto f = open_out(path);
    f.write(kRawMagic, 8);
    put_le32(f, rows);
    put_le32(f, cols);
    const std::size_t count = static_cast<std::size_t>(rows) * cols;
    for (std::size_t i = 0; i < count; ++i) put_le64(f, data[i]);
    if (!f) throw Error("write failed: " + path);
}

void write_image_f64(const std::string& path, const Vector& image, Index n)
{
    if (image.size() != n * n) throw DimensionError("write_image_f64: image is not n×n");
    std::vector<double> rowmajor(static_cast<std::size_t>(n * n));
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) rowmajor[static_cast<std::size_t>(i * n + j)] = image[i + n * j];
    write_raw_f64(path, rowmajor.data(), static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n));
}

RawArray read_raw_f64(const std::string& path)
{
    auto f = open_in(path);
    unsigned char head[16];
    f.read(reinterpret_cast<char*>(head), 16);
    if (f.gcount() != 16 || std::memcmp(head, kRawMagic, 8) != 0) throw Error(path + ": bad header");
    RawArray a;
    a.rows = get_le32(head + 8);
    a.cols = get_le32(head + 12);
    const std::size_t count = static_cast<std::size_t>(a.rows) * a.cols;
    std::vector<unsigned char> raw(8 * count);
    f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(f.gcount()) != raw.size()) throw Error(path + ": truncated data");
    a.data.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(raw[8 * i + static_cast<std::size_t>(b)]) << (8 * b);
        a.data[i] = std::bit_cast<double>(v);
    }
    return a;
}

} // namespace shiftrecycle::io
