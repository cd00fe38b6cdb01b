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

#include <optional>
#include <utility>
#include <vector>

#include "memtrack/assignment.hpp"
#include "memtrack/mask.hpp"
#include "memtrack/matrix.hpp"

namespace memtrack {

enum class SimilarityMode { inner_product, cosine };

struct TrackerConfig {
  double alpha = 0.7;  // memory update ratio, in [0, 1]
  SimilarityMode similarity = SimilarityMode::inner_product;
  bool gate_with_object_score = true;
  double mask_emit_threshold = 0.0;
};

// One frame's object proposals: per-query embedding, object score and mask.
// class_scores is only present when an upstream per-frame classifier ran
// (used by the score-averaging classification baseline).
struct FrameProposals {
  int frame_index = 0;
  Mat embeddings;                    // N x d
  std::vector<double> object_scores; // N, each in [0, 1]
  std::vector<RleMask> masks;        // N
  std::optional<Mat> class_scores;   // N x |C|

  int count() const { return embeddings.rows(); }
  int dim() const { return embeddings.cols(); }
};

// Memory queries plus per-slot tracking state. The slot count is fixed for
// the life of a video; after processing frame t every slot's history holds
// exactly t + 1 (frame, proposal) entries.
struct MemoryBank {
  Mat slots;                          // N x d memory queries
  std::vector<double> slot_last_score;
  std::vector<std::vector<std::pair<int, int>>> slot_history;

  int size() const { return slots.rows(); }
  int dim() const { return slots.cols(); }
};

struct TrackletFrame {
  int frame_index = 0;
  std::optional<RleMask> mask;
  double object_score = 0.0;
  int proposal_index = -1;
};

// One object's full per-frame record plus its category confidences
// (filled by the classifier).
struct Tracklet {
  int track_id = 0;  // memory slot index
  std::vector<TrackletFrame> per_frame;
  std::vector<double> class_scores;
  double mean_object_score = 0.0;
};

// Memory initialized from the first frame: slots copy the embeddings, slot i
// starts with history [(0, i)]. Throws ValidationError on an empty frame or
// when frame_index != 0.
MemoryBank init_memory(const FrameProposals& first);

// N x N matrix with entry (i, j) = similarity(slot_i, embedding_j).
// Cosine mode treats zero-norm vectors as similarity 0.
WeightMatrix similarity_matrix(const MemoryBank& bank,
                               const FrameProposals& frame,
                               SimilarityMode mode);

// Associates each proposal with one memory slot via the assignment solver on
// the similarity matrix; appends (frame, proposal) to every slot's history.
// Returns p with slot i <- proposal p[i]. Requires frame_index >= 1.
std::vector<int> associate(MemoryBank& bank, const FrameProposals& frame,
                           const TrackerConfig& cfg);

// Momentum update: slot_i <- a * q* + (1 - a) * slot_i with a = alpha * s,
// where q* and s come from the associated proposal (s forced to 1 when
// gating is off). a == 0 and a == 1 short-circuit so the identities hold
// bit-exactly; otherwise the blend is clamped per coordinate to the segment
// between old and new.
void update_memory(MemoryBank& bank, const FrameProposals& frame,
                   const std::vector<int>& p, const TrackerConfig& cfg);

struct TrackResult {
  std::vector<Tracklet> tracklets;
  MemoryBank bank;
};

// Runs the full per-video loop: init on frame 0, then associate + update for
// each later frame. Emits exactly N tracklets; a tracklet's frame-t mask is
// absent when the associated proposal's object score falls below
// cfg.mask_emit_threshold.
TrackResult track_video(const std::vector<FrameProposals>& frames,
                        const TrackerConfig& cfg);

}  // namespace memtrack
