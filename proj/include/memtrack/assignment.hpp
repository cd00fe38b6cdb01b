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

#include <utility>
#include <vector>

#include "memtrack/matrix.hpp"

namespace memtrack {

// Similarity weights fed to the solver. Entries are unbounded reals; every
// entry must be finite.
using WeightMatrix = Mat;

struct Assignment {
  // (row, col) pairs sorted by row; length min(rows, cols).
  std::vector<std::pair<int, int>> pairs;
  // Sum of the selected weights, accumulated in row order.
  double total = 0.0;
};

// Maximum-weight partial bijection via Kuhn-Munkres (weights are negated
// internally for a minimizing core; rectangular inputs are padded and padded
// pairs never returned). Among equal-weight optima the lexicographically
// smallest pair sequence wins: lowest row index first, then lowest col.
//
// Throws ValidationError on non-finite entries. An empty matrix yields an
// empty assignment.
Assignment solve_assignment(const WeightMatrix& weights);

}  // namespace memtrack
