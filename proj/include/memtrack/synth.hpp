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

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "memtrack/dataio.hpp"

namespace memtrack::synth {

struct FrameRange {
  int begin = 0;
  int end = 0;  // exclusive
};

// During [begin, end) one distractor slot impersonates the given object:
// it starts at the object's identity embedding and drifts to a random
// target it then keeps. Impostor k uses distractor slot k.
struct ImpostorWindow {
  int object_index = 0;
  int begin = 0;
  int end = 0;
};

// Deterministic synthetic video description: rectangles with linear motion,
// unit-norm identity embeddings per category, optional occlusion windows
// (low object score, stale mask, scrambled embedding) and distractors.
struct FixtureSpec {
  std::uint64_t seed = 0;
  int n_videos = 1;
  int n_objects = 1;
  int n_distractors = 0;
  int frame_count = 1;
  int height = 32;
  int width = 32;
  int embed_dim = 8;
  double noise_sigma = 0.0;
  std::vector<std::vector<FrameRange>> occlusion_windows;  // per object
  std::vector<int> categories;  // per object; empty means object i -> category i
  int n_categories = 0;         // 0 means max(categories) + 1
  std::vector<bool> base_flags; // empty means even category indices are base
  std::optional<std::pair<int, int>> box_size;  // (width, height), all objects
  bool with_class_scores = true;
  std::vector<ImpostorWindow> impostors;
};

struct Fixture {
  GroundTruthFile ground_truth;
  std::vector<VideoProposalFile> proposals;
  Vocabulary vocabulary;
  ClassHead class_head;
};

// Generates ground truth, one proposal file per video, the vocabulary
// (embeddings equal the object identity embeddings) and an identity class
// head. Throws ValidationError on inconsistent specs, including rectangles
// that cannot fit the canvas.
Fixture generate_fixture(const FixtureSpec& spec);

FixtureSpec load_fixture_spec(const std::filesystem::path& path);
void save_fixture_spec(const FixtureSpec& spec, const std::filesystem::path& path);

struct BruteForceResult {
  std::vector<std::pair<int, int>> pairs;  // sorted by row
  double total = 0.0;                      // accumulated in row order
};

// Exhaustive enumeration of all partial bijections of size min(rows, cols);
// ties resolved toward the lexicographically smallest pair sequence, same as
// the solver contract. Throws OracleSizeError when min(rows, cols) > 8.
BruteForceResult brute_force_assignment(const WeightMatrix& weights);

// Independent re-implementation of the evaluation metric on fully decoded
// dense grids; shares no mask or IoU code with the evaluator. Caps work at
// 10^7 pixels per video (OracleSizeError beyond).
EvalReport dense_reference_eval(const std::vector<Prediction>& preds,
                                const std::vector<GtInstance>& gts,
                                const Vocabulary& vocab, const EvalConfig& cfg);

}  // namespace memtrack::synth
