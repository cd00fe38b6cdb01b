// Copyright 2026 The Memtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include "memtrack/errors.hpp"

namespace memtrack {

// Run-length encoded binary mask over the column-major flattened bitmap.
// Runs alternate zero-run / one-run, starting with a zero-run; in canonical
// form only counts[0] may be zero and every later entry is positive.
// sum(counts) == height * width always holds for a valid mask.
struct RleMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint64_t> counts;

  std::uint64_t pixel_count() const {
    return static_cast<std::uint64_t>(height) * static_cast<std::uint64_t>(width);
  }

  friend bool operator==(const RleMask&, const RleMask&) = default;
};

// Dense H x W binary grid, stored row-major; (row, col) addressing.
struct Bitmap {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // height * width entries, row-major

  Bitmap() = default;
  Bitmap(int h, int w)
      : height(h), width(w),
        pixels(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), 0) {}

  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
  void set(int row, int col, bool value) {
    pixels[static_cast<std::size_t>(row) * width + col] = value ? 1 : 0;
  }

  friend bool operator==(const Bitmap&, const Bitmap&) = default;
};

// Lossless encode; the result is canonical. Throws DimensionError on
// zero-sized dimensions.
RleMask rle_encode(const Bitmap& bitmap);

// Exact inverse of rle_encode. Throws DimensionError when the run lengths do
// not sum to height * width.
Bitmap rle_decode(const RleMask& mask);

// Merges adjacent runs and drops interior zero-length runs; validates the
// pixel-count invariant. Loaders use this to accept non-canonical input.
RleMask rle_canonicalize(RleMask mask);

// Number of set pixels, computed from the run list alone.
std::uint64_t mask_area(const RleMask& mask);

// |a AND b| by run merging. Throws DimensionError on mismatched dimensions.
// Union area follows as mask_area(a) + mask_area(b) - intersection_area(a, b).
std::uint64_t intersection_area(const RleMask& a, const RleMask& b);

}  // namespace memtrack
