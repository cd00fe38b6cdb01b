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

#include "memtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "memtrack/errors.hpp"

namespace memtrack {

namespace {

void validate_frame(const FrameProposals& frame) {
  const int n = frame.count();
  if (static_cast<int>(frame.object_scores.size()) != n ||
      static_cast<int>(frame.masks.size()) != n)
    throw ValidationError("frame " + std::to_string(frame.frame_index) +
                          ": embeddings, object_scores and masks must share "
                          "the leading dimension");
  for (int i = 0; i < n; ++i) {
    const double s = frame.object_scores[i];
    if (!(s >= 0.0 && s <= 1.0))
      throw ValidationError("frame " + std::to_string(frame.frame_index) +
                            ": object score " + std::to_string(s) +
                            " outside [0, 1] at proposal " + std::to_string(i));
  }
}

void validate_config(const TrackerConfig& cfg) {
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
    throw ValidationError("alpha must be in [0, 1], got " +
                          std::to_string(cfg.alpha));
}

}  // namespace

MemoryBank init_memory(const FrameProposals& first) {
  if (first.frame_index != 0)
    throw ValidationError("init_memory expects frame 0, got frame " +
                          std::to_string(first.frame_index));
  validate_frame(first);
  if (first.count() == 0) throw ValidationError("empty video: no proposals in frame 0");

  MemoryBank bank;
  bank.slots = first.embeddings;
  bank.slot_last_score = first.object_scores;
  bank.slot_history.resize(first.count());
  for (int i = 0; i < first.count(); ++i) bank.slot_history[i] = {{0, i}};
  return bank;
}

WeightMatrix similarity_matrix(const MemoryBank& bank,
                               const FrameProposals& frame,
                               SimilarityMode mode) {
  if (bank.dim() != frame.dim())
    throw DimensionError("similarity_matrix: memory dimension " +
                         std::to_string(bank.dim()) +
                         " != embedding dimension " +
                         std::to_string(frame.dim()));
  const int n_slots = bank.size();
  const int n_props = frame.count();
  WeightMatrix sim(n_slots, n_props);

  std::vector<double> slot_norm, prop_norm;
  if (mode == SimilarityMode::cosine) {
    slot_norm.resize(n_slots);
    prop_norm.resize(n_props);
    for (int i = 0; i < n_slots; ++i)
      slot_norm[i] = std::sqrt(dot(bank.slots.row(i), bank.slots.row(i)));
    for (int j = 0; j < n_props; ++j)
      prop_norm[j] = std::sqrt(dot(frame.embeddings.row(j), frame.embeddings.row(j)));
  }

  for (int i = 0; i < n_slots; ++i) {
    const auto slot = bank.slots.row(i);
    for (int j = 0; j < n_props; ++j) {
      double value = dot(slot, frame.embeddings.row(j));
      if (mode == SimilarityMode::cosine) {
        const double denom = slot_norm[i] * prop_norm[j];
        value = denom > 0.0 ? value / denom : 0.0;
      }
      sim(i, j) = value;
    }
  }
  return sim;
}

std::vector<int> associate(MemoryBank& bank, const FrameProposals& frame,
                           const TrackerConfig& cfg) {
  if (frame.frame_index < 1)
    throw ValidationError("associate expects frame_index >= 1, got " +
                          std::to_string(frame.frame_index));
  validate_frame(frame);
  if (frame.count() != bank.size())
    throw ValidationError("frame " + std::to_string(frame.frame_index) +
                          ": proposal count " + std::to_string(frame.count()) +
                          " != memory slot count " + std::to_string(bank.size()));

  const WeightMatrix sim = similarity_matrix(bank, frame, cfg.similarity);
  const Assignment assignment = solve_assignment(sim);

  std::vector<int> slot_to_proposal(bank.size(), -1);
  for (const auto& [slot, proposal] : assignment.pairs)
    slot_to_proposal[slot] = proposal;
  for (int i = 0; i < bank.size(); ++i)
    bank.slot_history[i].emplace_back(frame.frame_index, slot_to_proposal[i]);
  return slot_to_proposal;
}

void update_memory(MemoryBank& bank, const FrameProposals& frame,
                   const std::vector<int>& p, const TrackerConfig& cfg) {
  validate_config(cfg);
  const int n = bank.size();
  if (static_cast<int>(p.size()) != n)
    throw ValidationError("invalid association: permutation size " +
                          std::to_string(p.size()) + " != slot count " +
                          std::to_string(n));
  std::vector<char> seen(n, 0);
  for (int target : p) {
    if (target < 0 || target >= frame.count() || seen[target])
      throw ValidationError("invalid association: not a bijection");
    seen[target] = 1;
  }

  const int d = bank.dim();
  for (int i = 0; i < n; ++i) {
    const int j = p[i];
    const double score = cfg.gate_with_object_score ? frame.object_scores[j] : 1.0;
    const double a = cfg.alpha * score;
    bank.slot_last_score[i] = score;
    if (a == 0.0) continue;
    auto slot = bank.slots.row(i);
    const auto q = frame.embeddings.row(j);
    if (a == 1.0) {
      std::copy(q.begin(), q.end(), slot.begin());
      continue;
    }
    for (int k = 0; k < d; ++k) {
      const double blended = a * q[k] + (1.0 - a) * slot[k];
      const double lo = std::min(slot[k], q[k]);
      const double hi = std::max(slot[k], q[k]);
      slot[k] = std::clamp(blended, lo, hi);
    }
  }
}

TrackResult track_video(const std::vector<FrameProposals>& frames,
                        const TrackerConfig& cfg) {
  validate_config(cfg);
  if (frames.empty()) throw ValidationError("empty video: no frames");
  const int n = frames[0].count();
  const int d = frames[0].dim();
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].frame_index != static_cast<int>(t))
      throw FormatError("non-contiguous frame indices: expected " +
                        std::to_string(t) + ", got " +
                        std::to_string(frames[t].frame_index));
    if (frames[t].count() != n)
      throw FormatError("frame " + std::to_string(t) + ": proposal count " +
                        std::to_string(frames[t].count()) + " != " +
                        std::to_string(n));
    if (frames[t].dim() != d)
      throw FormatError("frame " + std::to_string(t) + ": embedding dim " +
                        std::to_string(frames[t].dim()) + " != " +
                        std::to_string(d));
  }

  MemoryBank bank = init_memory(frames[0]);
  for (std::size_t t = 1; t < frames.size(); ++t) {
    const std::vector<int> p = associate(bank, frames[t], cfg);
    update_memory(bank, frames[t], p, cfg);
  }

  const int frame_count = static_cast<int>(frames.size());
  std::vector<Tracklet> tracklets(n);
  for (int i = 0; i < n; ++i) {
    Tracklet& track = tracklets[i];
    track.track_id = i;
    track.per_frame.reserve(frame_count);
    double score_sum = 0.0;
    for (int t = 0; t < frame_count; ++t) {
      const int j = bank.slot_history[i][t].second;
      const double score = frames[t].object_scores[j];
      TrackletFrame entry;
      entry.frame_index = t;
      entry.object_score = score;
      entry.proposal_index = j;
      if (score >= cfg.mask_emit_threshold) entry.mask = frames[t].masks[j];
      track.per_frame.push_back(std::move(entry));
      score_sum += score;
    }
    track.mean_object_score = score_sum / frame_count;
  }
  return {std::move(tracklets), std::move(bank)};
}

}  // namespace memtrack
