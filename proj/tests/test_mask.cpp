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

#include <doctest.h>

#include "memtrack/rng.hpp"

using namespace memtrack;

namespace {

Bitmap random_bitmap(Rng& rng, int max_dim = 64) {
  Bitmap b(rng.uniform_int(1, max_dim), rng.uniform_int(1, max_dim));
  const double density = rng.uniform();
  for (auto& px : b.pixels) px = rng.uniform() < density ? 1 : 0;
  return b;
}

// Independent counting of |a AND b| on the dense grids.
std::uint64_t dense_and_count(const Bitmap& a, const Bitmap& b) {
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i)
    if (a.pixels[i] && b.pixels[i]) ++count;
  return count;
}

}  // namespace

TEST_CASE("rle_encode handles the 2x2 corner cases") {
  Bitmap zeros(2, 2);
  CHECK(rle_encode(zeros).counts == std::vector<std::uint64_t>{4});

  Bitmap ones(2, 2);
  for (auto& px : ones.pixels) px = 1;
  CHECK(rle_encode(ones).counts == std::vector<std::uint64_t>{0, 4});

  Bitmap corner(2, 2);
  corner.set(0, 0, true);
  CHECK(rle_encode(corner).counts == std::vector<std::uint64_t>{0, 1, 3});
}

TEST_CASE("rle_encode rejects zero-sized dimensions") {
  Bitmap empty;
  CHECK_THROWS_AS(rle_encode(empty), DimensionError);
}

TEST_CASE("rle_decode inverts the 2x2 examples") {
  Bitmap zeros = rle_decode({2, 2, {4}});
  CHECK(zeros.pixels == std::vector<std::uint8_t>{0, 0, 0, 0});

  Bitmap ones = rle_decode({2, 2, {0, 4}});
  CHECK(ones.pixels == std::vector<std::uint8_t>{1, 1, 1, 1});

  Bitmap corner = rle_decode({2, 2, {0, 1, 3}});
  CHECK(corner.at(0, 0) == 1);
  CHECK(corner.at(1, 0) == 0);
  CHECK(corner.at(0, 1) == 0);
  CHECK(corner.at(1, 1) == 0);
}

TEST_CASE("rle_decode rejects masks whose runs do not cover the grid") {
  CHECK_THROWS_AS(rle_decode({2, 2, {3}}), DimensionError);
  CHECK_THROWS_AS(rle_decode({2, 2, {0, 5}}), DimensionError);
}

TEST_CASE("mask_area sums one-runs without decoding") {
  CHECK(mask_area({2, 2, {4}}) == 0);
  CHECK(mask_area({2, 2, {0, 4}}) == 4);
  CHECK(mask_area({2, 2, {0, 1, 3}}) == 1);
}

TEST_CASE("intersection_area matches hand-computed cases") {
  const RleMask corner{2, 2, {0, 1, 3}};
  CHECK(intersection_area(corner, corner) == mask_area(corner));

  // Disjoint single pixels: (0,0) vs (1,1).
  const RleMask other{2, 2, {3, 1}};
  CHECK(intersection_area(corner, other) == 0);

  // Left column {(0,0),(1,0)} vs top row {(0,0),(0,1)} -> only (0,0).
  const RleMask left_col{2, 2, {0, 2, 2}};
  const RleMask top_row{2, 2, {0, 1, 1, 1, 1}};
  CHECK(intersection_area(left_col, rle_canonicalize(top_row)) == 1);
}

TEST_CASE("intersection_area rejects mismatched dimensions") {
  CHECK_THROWS_AS(intersection_area({2, 2, {4}}, {2, 3, {6}}), DimensionError);
}

TEST_CASE("rle_canonicalize merges runs and preserves meaning") {
  // Interior zero-length run splits a one-run in two.
  const RleMask noisy{2, 2, {0, 1, 0, 1, 2}};
  const RleMask canon = rle_canonicalize(noisy);
  CHECK(canon.counts == std::vector<std::uint64_t>{0, 2, 2});
  // Column 0 fully set; Bitmap pixels are row-major.
  CHECK(rle_decode(canon).pixels == std::vector<std::uint8_t>{1, 0, 1, 0});

  // Trailing zero-run dropped.
  CHECK(rle_canonicalize({2, 2, {0, 4, 0}}).counts ==
        std::vector<std::uint64_t>{0, 4});
}

TEST_CASE("round-trip is the identity on 1000 random bitmaps") {
  Rng rng(7001);
  for (int i = 0; i < 1000; ++i) {
    const Bitmap b = random_bitmap(rng);
    const RleMask m = rle_encode(b);
    REQUIRE(rle_decode(m) == b);
    // Canonical form: only the first count may be zero.
    for (std::size_t k = 1; k < m.counts.size(); ++k) REQUIRE(m.counts[k] > 0);
    REQUIRE(mask_area(m) ==
            static_cast<std::uint64_t>(
                std::count(b.pixels.begin(), b.pixels.end(), 1)));
  }
}

TEST_CASE("run-merge intersection equals the dense AND count") {
  Rng rng(7002);
  for (int i = 0; i < 300; ++i) {
    const int h = rng.uniform_int(1, 48);
    const int w = rng.uniform_int(1, 48);
    Bitmap a(h, w), b(h, w);
    for (auto& px : a.pixels) px = rng.uniform() < 0.4 ? 1 : 0;
    for (auto& px : b.pixels) px = rng.uniform() < 0.4 ? 1 : 0;
    const RleMask ra = rle_encode(a);
    const RleMask rb = rle_encode(b);
    const std::uint64_t inter = intersection_area(ra, rb);
    REQUIRE(inter == dense_and_count(a, b));
    REQUIRE(inter <= std::min(mask_area(ra), mask_area(rb)));
  }
}
