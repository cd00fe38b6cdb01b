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

#include "memtrack/mask.hpp"

#include <algorithm>
#include <string>

namespace memtrack {

namespace {

void check_dims(int height, int width) {
  if (height <= 0 || width <= 0)
    throw DimensionError("mask dimensions must be positive, got " +
                         std::to_string(height) + "x" + std::to_string(width));
}

std::uint64_t counts_sum(const RleMask& mask) {
  std::uint64_t total = 0;
  for (auto c : mask.counts) total += c;
  return total;
}

// Iterates (value, run length) over a run list, skipping zero-length runs.
struct RunCursor {
  const std::vector<std::uint64_t>& counts;
  std::size_t index = 0;
  bool value = false;     // value of the run at `index` (runs start with zeros)
  std::uint64_t left = 0; // remaining pixels in the current run

  explicit RunCursor(const std::vector<std::uint64_t>& c) : counts(c) {
    if (!counts.empty()) left = counts[0];
    skip_empty();
  }

  bool done() const { return index >= counts.size(); }

  void skip_empty() {
    while (left == 0 && ++index < counts.size()) {
      value = !value;
      left = counts[index];
    }
  }

  void consume(std::uint64_t n) {
    left -= n;
    skip_empty();
  }
};

}  // namespace

RleMask rle_encode(const Bitmap& bitmap) {
  check_dims(bitmap.height, bitmap.width);
  RleMask mask;
  mask.height = bitmap.height;
  mask.width = bitmap.width;

  bool current = false;  // runs start with a zero-run
  std::uint64_t run = 0;
  for (int col = 0; col < bitmap.width; ++col) {
    for (int row = 0; row < bitmap.height; ++row) {
      const bool v = bitmap.at(row, col) != 0;
      if (v == current) {
        ++run;
      } else {
        mask.counts.push_back(run);
        current = v;
        run = 1;
      }
    }
  }
  mask.counts.push_back(run);
  return mask;
}

Bitmap rle_decode(const RleMask& mask) {
  check_dims(mask.height, mask.width);
  if (counts_sum(mask) != mask.pixel_count())
    throw DimensionError("corrupt mask: run lengths sum to " +
                         std::to_string(counts_sum(mask)) + ", expected " +
                         std::to_string(mask.pixel_count()));

  Bitmap bitmap(mask.height, mask.width);
  std::uint64_t flat = 0;
  bool value = false;
  for (auto count : mask.counts) {
    if (value) {
      for (std::uint64_t k = 0; k < count; ++k) {
        const std::uint64_t p = flat + k;
        const int col = static_cast<int>(p / mask.height);
        const int row = static_cast<int>(p % mask.height);
        bitmap.set(row, col, true);
      }
    }
    flat += count;
    value = !value;
  }
  return bitmap;
}

RleMask rle_canonicalize(RleMask mask) {
  check_dims(mask.height, mask.width);
  // Collapse to (value, length) segments, dropping zero-length runs and
  // merging adjacent equal-valued runs.
  std::vector<std::pair<bool, std::uint64_t>> segments;
  bool value = false;
  for (auto count : mask.counts) {
    if (count > 0) {
      if (!segments.empty() && segments.back().first == value)
        segments.back().second += count;
      else
        segments.emplace_back(value, count);
    }
    value = !value;
  }

  RleMask out;
  out.height = mask.height;
  out.width = mask.width;
  if (!segments.empty() && segments.front().first) out.counts.push_back(0);
  for (const auto& segment : segments) out.counts.push_back(segment.second);
  if (out.counts.empty()) out.counts.push_back(0);
  if (counts_sum(out) != out.pixel_count())
    throw DimensionError("corrupt mask: run lengths sum to " +
                         std::to_string(counts_sum(out)) + ", expected " +
                         std::to_string(out.pixel_count()));
  return out;
}

std::uint64_t mask_area(const RleMask& mask) {
  std::uint64_t area = 0;
  for (std::size_t i = 1; i < mask.counts.size(); i += 2) area += mask.counts[i];
  return area;
}

std::uint64_t intersection_area(const RleMask& a, const RleMask& b) {
  if (a.height != b.height || a.width != b.width)
    throw DimensionError("intersection_area: dimension mismatch " +
                         std::to_string(a.height) + "x" + std::to_string(a.width) +
                         " vs " + std::to_string(b.height) + "x" +
                         std::to_string(b.width));

  RunCursor ca(a.counts);
  RunCursor cb(b.counts);
  std::uint64_t inter = 0;
  while (!ca.done() && !cb.done()) {
    const std::uint64_t step = std::min(ca.left, cb.left);
    if (ca.value && cb.value) inter += step;
    ca.consume(step);
    cb.consume(step);
  }
  return inter;
}

}  // namespace memtrack
