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

#include "memtrack/synth.hpp"

#include <cmath>

#include <doctest.h>

#include "memtrack/rng.hpp"

using namespace memtrack;
using synth::FixtureSpec;

namespace {

FixtureSpec basic_spec() {
  FixtureSpec spec;
  spec.seed = 11;
  spec.n_objects = 2;
  spec.frame_count = 6;
  spec.height = 32;
  spec.width = 32;
  spec.embed_dim = 16;
  return spec;
}

// Runs the real pipeline in memory and evaluates.
EvalReport pipeline_report(const synth::Fixture& fixture) {
  std::vector<Prediction> predictions;
  for (const auto& video : fixture.proposals) {
    TrackResult result = track_video(video.frames, TrackerConfig{});
    classify_tracks(result.bank, result.tracklets, fixture.class_head,
                    fixture.vocabulary, ClassifierConfig{});
    auto preds = tracklets_to_predictions(video.video_id, result.tracklets,
                                          fixture.vocabulary,
                                          PredictionExportOptions{});
    predictions.insert(predictions.end(), preds.begin(), preds.end());
  }
  return evaluate(predictions, fixture.ground_truth.annotations,
                  fixture.vocabulary, EvalConfig{});
}

}  // namespace

TEST_CASE("noiseless fixtures round-trip to a perfect mAP") {
  const synth::Fixture fixture = synth::generate_fixture(basic_spec());
  REQUIRE(fixture.proposals.size() == 1);
  REQUIRE(fixture.proposals[0].frames.size() == 6);
  const EvalReport report = pipeline_report(fixture);
  CHECK(report.map == 1.0);
  CHECK(report.map_base == 1.0);
  CHECK(report.map_novel == 1.0);
}

TEST_CASE("the same seed reproduces the fixture exactly") {
  const synth::Fixture a = synth::generate_fixture(basic_spec());
  const synth::Fixture b = synth::generate_fixture(basic_spec());
  REQUIRE(a.proposals.size() == b.proposals.size());
  for (std::size_t v = 0; v < a.proposals.size(); ++v) {
    REQUIRE(a.proposals[v].frames.size() == b.proposals[v].frames.size());
    for (std::size_t t = 0; t < a.proposals[v].frames.size(); ++t) {
      CHECK(a.proposals[v].frames[t].embeddings == b.proposals[v].frames[t].embeddings);
      CHECK(a.proposals[v].frames[t].masks == b.proposals[v].frames[t].masks);
    }
  }
  CHECK(a.vocabulary.categories[0].embedding == b.vocabulary.categories[0].embedding);
}

TEST_CASE("different seeds change the geometry") {
  FixtureSpec other = basic_spec();
  other.seed = 12;
  const synth::Fixture a = synth::generate_fixture(basic_spec());
  const synth::Fixture b = synth::generate_fixture(other);
  CHECK(a.proposals[0].frames[0].masks != b.proposals[0].frames[0].masks);
}

TEST_CASE("occluded objects keep one track id across the gap") {
  FixtureSpec spec = basic_spec();
  spec.frame_count = 20;
  spec.occlusion_windows = {{{10, 15}}};  // object 0 hidden on frames 10..14
  const synth::Fixture fixture = synth::generate_fixture(spec);

  const auto& frames = fixture.proposals[0].frames;
  for (int t = 10; t < 15; ++t) {
    CHECK(frames[t].object_scores[0] == 0.05);
    CHECK_FALSE(fixture.ground_truth.annotations[0].masks[t].has_value());
  }
  CHECK(frames[15].object_scores[0] == 0.95);

  TrackerConfig cfg;  // alpha 0.7, gated
  const TrackResult result = track_video(frames, cfg);
  // The tracklet that owns object 0 before the gap still owns it after.
  CHECK(result.tracklets[0].per_frame[9].proposal_index == 0);
  CHECK(result.tracklets[0].per_frame[15].proposal_index == 0);
  CHECK(result.tracklets[0].per_frame[19].proposal_index == 0);
}

TEST_CASE("fixture specs reject impossible rectangles") {
  FixtureSpec spec = basic_spec();
  spec.box_size = {100, 100};
  CHECK_THROWS_AS(synth::generate_fixture(spec), ValidationError);
}

TEST_CASE("fixture spec files round-trip") {
  FixtureSpec spec = basic_spec();
  spec.n_distractors = 1;
  spec.noise_sigma = 0.05;
  spec.occlusion_windows = {{{2, 4}}};
  spec.impostors = {{0, 2, 4}};
  spec.base_flags = {true, false};
  const auto path = std::filesystem::temp_directory_path() / "memtrack_spec.json";
  synth::save_fixture_spec(spec, path);
  const FixtureSpec loaded = synth::load_fixture_spec(path);
  CHECK(loaded.seed == spec.seed);
  CHECK(loaded.noise_sigma == spec.noise_sigma);
  CHECK(loaded.occlusion_windows.size() == 1);
  CHECK(loaded.impostors.size() == 1);
  CHECK(loaded.base_flags == std::vector<bool>{true, false});
}

TEST_CASE("brute_force_assignment reproduces the solver examples") {
  using Pairs = std::vector<std::pair<int, int>>;
  auto diag = synth::brute_force_assignment(
      Mat::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  CHECK(diag.pairs == Pairs{{0, 0}, {1, 1}, {2, 2}});
  CHECK(diag.total == 3.0);

  auto mid = synth::brute_force_assignment(
      Mat::from_rows({{0.9, 0.1, 0.0}, {0.2, 0.8, 0.1}, {0.0, 0.3, 0.7}}));
  CHECK(mid.pairs == Pairs{{0, 0}, {1, 1}, {2, 2}});
  CHECK(mid.total == doctest::Approx(2.4));

  auto rect = synth::brute_force_assignment(
      Mat::from_rows({{0.1, 0.9, 0.2}, {0.8, 0.1, 0.1}}));
  CHECK(rect.pairs == Pairs{{0, 1}, {1, 0}});
  CHECK(rect.total == doctest::Approx(1.7));

  WeightMatrix big(9, 9);
  CHECK_THROWS_AS(synth::brute_force_assignment(big), OracleSizeError);
}

TEST_CASE("dense_reference_eval agrees with evaluate on simple constructions") {
  // Perfect single-instance case.
  Bitmap gt_bitmap(8, 8);
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 5; ++y) gt_bitmap.set(y, x, true);
  const MaskSequence gt_masks = {rle_encode(gt_bitmap)};

  Vocabulary vocab;
  vocab.prompt_template = "x";
  vocab.categories.push_back({1, "a", true, {1.0, 0.0}});

  std::vector<GtInstance> gts(1);
  gts[0].video_id = "v";
  gts[0].category_id = 1;
  gts[0].masks = gt_masks;

  Prediction perfect;
  perfect.video_id = "v";
  perfect.category_id = 1;
  perfect.confidence = 1.0;
  perfect.masks = gt_masks;

  const EvalReport fast = evaluate({perfect}, gts, vocab, EvalConfig{});
  const EvalReport slow = synth::dense_reference_eval({perfect}, gts, vocab, EvalConfig{});
  CHECK(fast.map == slow.map);
  CHECK(*slow.map == 1.0);

  // The 0.72-IoU construction lands on 0.5 in both implementations.
  Bitmap partial(8, 8);
  int remaining = 18;
  for (int x = 0; x < 5 && remaining > 0; ++x)
    for (int y = 0; y < 5 && remaining > 0; --remaining, ++y) partial.set(y, x, true);
  Prediction rough = perfect;
  rough.masks = {rle_encode(partial)};
  const EvalReport fast2 = evaluate({rough}, gts, vocab, EvalConfig{});
  const EvalReport slow2 = synth::dense_reference_eval({rough}, gts, vocab, EvalConfig{});
  CHECK(*fast2.map == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*slow2.map == doctest::Approx(*fast2.map).epsilon(1e-12));
}

TEST_CASE("dense_reference_eval matches the pipeline on random fixtures") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    Rng rng(seed);
    FixtureSpec spec;
    spec.seed = seed;
    spec.n_videos = rng.uniform_int(1, 2);
    spec.n_objects = rng.uniform_int(1, 3);
    spec.n_distractors = rng.uniform_int(0, 2);
    spec.frame_count = rng.uniform_int(2, 10);
    spec.height = rng.uniform_int(12, 32);
    spec.width = rng.uniform_int(12, 32);
    spec.embed_dim = 12;
    spec.noise_sigma = rng.uniform() * 0.2;
    const synth::Fixture fixture = synth::generate_fixture(spec);

    std::vector<Prediction> predictions;
    for (const auto& video : fixture.proposals) {
      TrackResult result = track_video(video.frames, TrackerConfig{});
      classify_tracks(result.bank, result.tracklets, fixture.class_head,
                      fixture.vocabulary, ClassifierConfig{});
      auto preds = tracklets_to_predictions(video.video_id, result.tracklets,
                                            fixture.vocabulary,
                                            PredictionExportOptions{});
      predictions.insert(predictions.end(), preds.begin(), preds.end());
    }
    const EvalReport fast = evaluate(predictions, fixture.ground_truth.annotations,
                                     fixture.vocabulary, EvalConfig{});
    const EvalReport slow = synth::dense_reference_eval(
        predictions, fixture.ground_truth.annotations, fixture.vocabulary,
        EvalConfig{});
    REQUIRE(fast.map.has_value());
    REQUIRE(slow.map.has_value());
    CHECK(*fast.map == doctest::Approx(*slow.map).epsilon(1e-12));
    for (const auto& [cat, ap] : fast.per_category_ap)
      CHECK(ap == doctest::Approx(slow.per_category_ap.at(cat)).epsilon(1e-12));
  }
}

TEST_CASE("dense_reference_eval refuses oversized inputs") {
  Vocabulary vocab;
  vocab.prompt_template = "x";
  vocab.categories.push_back({1, "a", true, {1.0}});
  GtInstance gt;
  gt.video_id = "v";
  gt.category_id = 1;
  // 4000x4000 over 10 frames exceeds the 1e7 pixel cap.
  RleMask big{4000, 4000, {0, 16000000}};
  gt.masks.assign(10, big);
  CHECK_THROWS_AS(synth::dense_reference_eval({}, {gt}, vocab, EvalConfig{}),
                  OracleSizeError);
}
