// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shiftrecycle/common.hpp"

namespace shiftrecycle::io {

struct PgmRange {
    double min = 0.0;
    double max = 0.0;
};

/// Binary P5, maxval 65535, big-endian samples. `image` is n×n column-major;
/// values are rescaled linearly so min → 0 and max → 65535 (a constant image
/// maps to 0). Returns the range used.
PgmRange write_pgm16(const std::string& path, const Vector& image, Index n);

struct PgmImage {
    Index width = 0;
    Index height = 0;
    std::vector<std::uint16_t> samples; // row-major
};
PgmImage read_pgm16(const std::string& path);

/// Eight-byte magic of the flat float64 format.
inline constexpr char kRawMagic[8] = {'S', 'R', 'C', 'F', '6', '4', 'L', 'E'};

/// 16-byte header (magic, uint32 rows, uint32 cols, little-endian) followed
/// by rows·cols little-endian doubles in row-major order.
void write_raw_f64(const std::string& path, const double* data, std::uint32_t rows, std::uint32_t cols);
/// Writes an n×n column-major image as an n-row, n-column array.
void write_image_f64(const std::string& path, const Vector& image, Index n);

struct RawArray {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<double> data; // row-major
};
RawArray read_raw_f64(const std::string& path);

} // namespace shiftrecycle::io
