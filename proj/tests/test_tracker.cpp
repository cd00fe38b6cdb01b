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

#include <doctest.h>

#include "memtrack/rng.hpp"

using namespace memtrack;

namespace {

RleMask pixel_mask(int index) {
  // 2x2 mask with a single pixel at the given column-major index.
  RleMask m{2, 2, {}};
  m.counts = {static_cast<std::uint64_t>(index), 1,
              static_cast<std::uint64_t>(3 - index)};
  return rle_canonicalize(m);
}

FrameProposals make_frame(int index, const std::vector<std::vector<double>>& emb,
                          std::vector<double> scores) {
  FrameProposals f;
  f.frame_index = index;
  f.embeddings = Mat::from_rows(emb);
  f.object_scores = std::move(scores);
  for (int i = 0; i < f.embeddings.rows(); ++i) f.masks.push_back(pixel_mask(i));
  return f;
}

}  // namespace

TEST_CASE("init_memory copies the first frame") {
  const FrameProposals first = make_frame(0, {{1, 0}, {0, 1}}, {0.2, 0.9});
  const MemoryBank bank = init_memory(first);
  CHECK(bank.slots == first.embeddings);
  CHECK(bank.slot_last_score == std::vector<double>{0.2, 0.9});
  REQUIRE(bank.slot_history.size() == 2);
  CHECK(bank.slot_history[0] == std::vector<std::pair<int, int>>{{0, 0}});
  CHECK(bank.slot_history[1] == std::vector<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("init_memory rejects empty and out-of-order frames") {
  FrameProposals empty;
  empty.frame_index = 0;
  CHECK_THROWS_AS(init_memory(empty), ValidationError);
  CHECK_THROWS_AS(init_memory(make_frame(1, {{1.0}}, {1.0})), ValidationError);
}

TEST_CASE("similarity_matrix computes inner products slot-by-proposal") {
  const MemoryBank bank = init_memory(make_frame(0, {{1, 0}, {0, 1}}, {1, 1}));
  const FrameProposals frame = make_frame(1, {{0.9, 0.1}, {0.2, 0.8}}, {1, 1});
  const WeightMatrix sim =
      similarity_matrix(bank, frame, SimilarityMode::inner_product);
  CHECK(sim(0, 0) == doctest::Approx(0.9));
  CHECK(sim(0, 1) == doctest::Approx(0.2));
  CHECK(sim(1, 0) == doctest::Approx(0.1));
  CHECK(sim(1, 1) == doctest::Approx(0.8));
}

TEST_CASE("orthonormal slots against themselves give the identity") {
  const auto rows = std::vector<std::vector<double>>{{1, 0}, {0, 1}};
  const MemoryBank bank = init_memory(make_frame(0, rows, {1, 1}));
  const WeightMatrix sim = similarity_matrix(bank, make_frame(1, rows, {1, 1}),
                                             SimilarityMode::inner_product);
  CHECK(sim(0, 0) == 1.0);
  CHECK(sim(1, 1) == 1.0);
  CHECK(sim(0, 1) == 0.0);
  CHECK(sim(1, 0) == 0.0);
}

TEST_CASE("cosine similarity ignores scale and handles zero norms") {
  const MemoryBank bank = init_memory(make_frame(0, {{2, 0}, {0, 0}}, {1, 1}));
  const FrameProposals frame = make_frame(1, {{1, 0}, {0, 3}}, {1, 1});
  const WeightMatrix sim = similarity_matrix(bank, frame, SimilarityMode::cosine);
  CHECK(sim(0, 0) == doctest::Approx(1.0));
  CHECK(sim(1, 0) == 0.0);  // zero-norm slot
  CHECK(sim(1, 1) == 0.0);
}

TEST_CASE("similarity_matrix rejects dimension mismatches") {
  const MemoryBank bank = init_memory(make_frame(0, {{1, 0}}, {1}));
  FrameProposals frame;
  frame.frame_index = 1;
  frame.embeddings = Mat::from_rows({{1, 0, 0}});
  frame.object_scores = {1};
  frame.masks = {pixel_mask(0)};
  CHECK_THROWS_AS(similarity_matrix(bank, frame, SimilarityMode::inner_product),
                  DimensionError);
}

TEST_CASE("associate returns the identity when the frame repeats") {
  MemoryBank bank = init_memory(make_frame(0, {{1, 0}, {0, 1}}, {1, 1}));
  const std::vector<int> p =
      associate(bank, make_frame(1, {{1, 0}, {0, 1}}, {1, 1}), TrackerConfig{});
  CHECK(p == std::vector<int>{0, 1});
  CHECK(bank.slot_history[0].back() == std::pair<int, int>{1, 0});
}

TEST_CASE("associate tracks a row swap as a transposition") {
  MemoryBank bank = init_memory(make_frame(0, {{1, 0}, {0, 1}}, {1, 1}));
  const std::vector<int> p =
      associate(bank, make_frame(1, {{0, 1}, {1, 0}}, {1, 1}), TrackerConfig{});
  CHECK(p == std::vector<int>{1, 0});
}

TEST_CASE("associate resolves the 3x3 brute-force example diagonally") {
  MemoryBank bank = init_memory(make_frame(0, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                                           {1, 1, 1}));
  // Proposal embeddings chosen so the similarity matrix equals the solver's
  // 3x3 worked example.
  const FrameProposals frame = make_frame(
      1, {{0.9, 0.2, 0.0}, {0.1, 0.8, 0.3}, {0.0, 0.1, 0.7}}, {1, 1, 1});
  const std::vector<int> p = associate(bank, frame, TrackerConfig{});
  CHECK(p == std::vector<int>{0, 1, 2});
}

TEST_CASE("associate requires frame_index >= 1") {
  MemoryBank bank = init_memory(make_frame(0, {{1, 0}}, {1}));
  CHECK_THROWS_AS(associate(bank, make_frame(0, {{1, 0}}, {1}), TrackerConfig{}),
                  ValidationError);
}

TEST_CASE("update_memory: alpha 0 leaves the bank bit-identical") {
  MemoryBank bank = init_memory(make_frame(0, {{0.3, -0.7}, {0.1, 0.5}}, {1, 1}));
  const Mat before = bank.slots;
  TrackerConfig cfg;
  cfg.alpha = 0.0;
  update_memory(bank, make_frame(1, {{9, 9}, {-9, -9}}, {1, 1}), {0, 1}, cfg);
  CHECK(bank.slots == before);
}

TEST_CASE("update_memory: object score 0 freezes that slot") {
  MemoryBank bank = init_memory(make_frame(0, {{0.3, -0.7}, {0.1, 0.5}}, {1, 1}));
  const Mat before = bank.slots;
  TrackerConfig cfg;
  cfg.alpha = 0.7;
  update_memory(bank, make_frame(1, {{9, 9}, {-9, -9}}, {0.0, 0.0}), {0, 1}, cfg);
  CHECK(bank.slots == before);
  CHECK(bank.slot_last_score == std::vector<double>{0.0, 0.0});
}

TEST_CASE("update_memory blends by alpha * score") {
  MemoryBank bank = init_memory(make_frame(0, {{1, 0}}, {1}));
  TrackerConfig cfg;
  cfg.alpha = 0.7;
  update_memory(bank, make_frame(1, {{0, 1}}, {0.5}), {0}, cfg);
  // a = 0.35: 0.35 * [0,1] + 0.65 * [1,0] = [0.65, 0.35]
  CHECK(bank.slots(0, 0) == doctest::Approx(0.65).epsilon(1e-12));
  CHECK(bank.slots(0, 1) == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(bank.slot_last_score[0] == 0.5);
}

TEST_CASE("update_memory rejects non-bijective associations") {
  MemoryBank bank = init_memory(make_frame(0, {{1, 0}, {0, 1}}, {1, 1}));
  const FrameProposals frame = make_frame(1, {{1, 0}, {0, 1}}, {1, 1});
  CHECK_THROWS_AS(update_memory(bank, frame, {0, 0}, TrackerConfig{}),
                  ValidationError);
  CHECK_THROWS_AS(update_memory(bank, frame, {0}, TrackerConfig{}),
                  ValidationError);
  CHECK_THROWS_AS(update_memory(bank, frame, {0, 2}, TrackerConfig{}),
                  ValidationError);
}

TEST_CASE("track_video on a single frame yields one proposal per tracklet") {
  const TrackResult result =
      track_video({make_frame(0, {{1, 0}, {0, 1}}, {0.5, 0.8})}, TrackerConfig{});
  REQUIRE(result.tracklets.size() == 2);
  CHECK(result.tracklets[0].per_frame.size() == 1);
  CHECK(result.tracklets[0].per_frame[0].mask == pixel_mask(0));
  CHECK(result.tracklets[1].mean_object_score == 0.8);
}

TEST_CASE("track_video follows a row swap across two frames") {
  const TrackResult result = track_video(
      {make_frame(0, {{1, 0}, {0, 1}}, {1, 1}),
       make_frame(1, {{0, 1}, {1, 0}}, {1, 1})},
      TrackerConfig{});
  // Tracklet 0 carries proposal 0 at frame 0 and proposal 1 at frame 1.
  CHECK(result.tracklets[0].per_frame[0].proposal_index == 0);
  CHECK(result.tracklets[0].per_frame[1].proposal_index == 1);
  CHECK(result.tracklets[0].per_frame[1].mask == pixel_mask(1));
  CHECK(result.tracklets[1].per_frame[1].proposal_index == 0);
}

TEST_CASE("track_video validates frame consistency") {
  CHECK_THROWS_AS(track_video({}, TrackerConfig{}), ValidationError);
  CHECK_THROWS_AS(track_video({make_frame(0, {{1, 0}}, {1}),
                               make_frame(2, {{1, 0}}, {1})},
                              TrackerConfig{}),
                  FormatError);
  CHECK_THROWS_AS(track_video({make_frame(0, {{1, 0}}, {1}),
                               make_frame(1, {{1, 0}, {0, 1}}, {1, 1})},
                              TrackerConfig{}),
                  FormatError);
  CHECK_THROWS_AS(track_video({make_frame(0, {{1, 0}}, {1}),
                               make_frame(1, {{1, 0, 0}}, {1})},
                              TrackerConfig{}),
                  FormatError);
}

TEST_CASE("mask_emit_threshold suppresses low-score masks") {
  TrackerConfig cfg;
  cfg.mask_emit_threshold = 0.5;
  const TrackResult result = track_video(
      {make_frame(0, {{1, 0}}, {0.4}), make_frame(1, {{1, 0}}, {0.9})}, cfg);
  CHECK_FALSE(result.tracklets[0].per_frame[0].mask.has_value());
  CHECK(result.tracklets[0].per_frame[1].mask.has_value());
  CHECK(result.tracklets[0].mean_object_score == doctest::Approx(0.65));
}

TEST_CASE("frozen memory: alpha 0 keeps frame-0 embeddings exactly") {
  Rng rng(9001);
  std::vector<FrameProposals> frames;
  for (int t = 0; t < 6; ++t) {
    std::vector<std::vector<double>> emb(3, std::vector<double>(4));
    for (auto& row : emb)
      for (auto& x : row) x = rng.normal();
    frames.push_back(make_frame(t, emb, {0.5, 0.9, 0.7}));
  }
  TrackerConfig cfg;
  cfg.alpha = 0.0;
  const TrackResult result = track_video(frames, cfg);
  CHECK(result.bank.slots == frames[0].embeddings);
}

TEST_CASE("replacement identity: alpha 1 with scores 1 copies the frame") {
  Rng rng(9002);
  std::vector<FrameProposals> frames;
  for (int t = 0; t < 5; ++t) {
    std::vector<std::vector<double>> emb(3, std::vector<double>(4));
    for (auto& row : emb)
      for (auto& x : row) x = rng.normal();
    frames.push_back(make_frame(t, emb, {1.0, 1.0, 1.0}));
  }
  TrackerConfig cfg;
  cfg.alpha = 1.0;
  const TrackResult result = track_video(frames, cfg);
  // Slot i holds the embedding of the proposal it was associated with in the
  // final frame, bit-exactly.
  for (int i = 0; i < 3; ++i) {
    const int j = result.tracklets[i].per_frame.back().proposal_index;
    for (int k = 0; k < 4; ++k)
      REQUIRE(result.bank.slots(i, k) == frames.back().embeddings(j, k));
  }
}

TEST_CASE("convex-combination bound holds per coordinate") {
  Rng rng(9003);
  for (int step = 0; step < 500; ++step) {
    MemoryBank bank = init_memory(
        make_frame(0, {{rng.normal(), rng.normal(), rng.normal()}}, {1.0}));
    const Mat before = bank.slots;
    const FrameProposals frame =
        make_frame(1, {{rng.normal(), rng.normal(), rng.normal()}}, {rng.uniform()});
    TrackerConfig cfg;
    cfg.alpha = rng.uniform();
    update_memory(bank, frame, {0}, cfg);
    for (int k = 0; k < 3; ++k) {
      const double lo = std::min(before(0, k), frame.embeddings(0, k));
      const double hi = std::max(before(0, k), frame.embeddings(0, k));
      REQUIRE(bank.slots(0, k) >= lo);
      REQUIRE(bank.slots(0, k) <= hi);
    }
  }
}

TEST_CASE("scaling all embeddings does not change the associations") {
  Rng rng(9004);
  std::vector<FrameProposals> frames, scaled;
  const double c = 3.25;
  for (int t = 0; t < 5; ++t) {
    std::vector<std::vector<double>> emb(4, std::vector<double>(3));
    for (auto& row : emb)
      for (auto& x : row) x = rng.normal();
    frames.push_back(make_frame(t, emb, {0.9, 0.8, 0.7, 0.6}));
    for (auto& row : emb)
      for (auto& x : row) x *= c;
    scaled.push_back(make_frame(t, emb, {0.9, 0.8, 0.7, 0.6}));
  }
  const TrackResult a = track_video(frames, TrackerConfig{});
  const TrackResult b = track_video(scaled, TrackerConfig{});
  for (std::size_t i = 0; i < a.tracklets.size(); ++i)
    for (std::size_t t = 0; t < a.tracklets[i].per_frame.size(); ++t)
      REQUIRE(a.tracklets[i].per_frame[t].proposal_index ==
              b.tracklets[i].per_frame[t].proposal_index);
}

TEST_CASE("tracking is deterministic") {
  Rng rng(9005);
  std::vector<FrameProposals> frames;
  for (int t = 0; t < 8; ++t) {
    std::vector<std::vector<double>> emb(3, std::vector<double>(5));
    for (auto& row : emb)
      for (auto& x : row) x = rng.normal();
    frames.push_back(make_frame(t, emb, {rng.uniform(), rng.uniform(), rng.uniform()}));
  }
  const TrackResult a = track_video(frames, TrackerConfig{});
  const TrackResult b = track_video(frames, TrackerConfig{});
  CHECK(a.bank.slots == b.bank.slots);
  for (std::size_t i = 0; i < a.tracklets.size(); ++i) {
    REQUIRE(a.tracklets[i].per_frame.size() == b.tracklets[i].per_frame.size());
    for (std::size_t t = 0; t < a.tracklets[i].per_frame.size(); ++t) {
      CHECK(a.tracklets[i].per_frame[t].proposal_index ==
            b.tracklets[i].per_frame[t].proposal_index);
      CHECK(a.tracklets[i].per_frame[t].mask == b.tracklets[i].per_frame[t].mask);
    }
  }
}
