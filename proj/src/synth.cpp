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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "memtrack/errors.hpp"
#include "memtrack/rng.hpp"

namespace memtrack::synth {

using nlohmann::json;

namespace {

constexpr double kVisibleScore = 0.95;
constexpr double kOccludedScore = 0.05;
constexpr double kDistractorScore = 0.1;
constexpr double kClassScoreTemperature = 50.0;

// Stream ids for Rng::derive; part of the reproducibility contract.
constexpr std::uint64_t kVocabStream = 1;
constexpr std::uint64_t kVideoStreamBase = 1000;

std::vector<double> random_unit_vector(Rng& rng, int dim) {
  std::vector<double> v(dim);
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm_sq += x * x;
    }
  } while (norm_sq == 0.0);
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (auto& x : v) x *= inv;
  return v;
}

std::vector<double> normalized(std::vector<double> v) {
  double norm_sq = 0.0;
  for (double x : v) norm_sq += x * x;
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& x : v) x *= inv;
  }
  return v;
}

RleMask rect_mask(int height, int width, int x0, int y0, int bw, int bh) {
  RleMask mask;
  mask.height = height;
  mask.width = width;
  mask.counts.push_back(static_cast<std::uint64_t>(x0) * height + y0);
  for (int c = 0; c < bw; ++c) {
    mask.counts.push_back(bh);
    if (c + 1 < bw) mask.counts.push_back(height - bh);
  }
  const std::uint64_t used =
      static_cast<std::uint64_t>(x0 + bw - 1) * height + y0 + bh;
  mask.counts.push_back(static_cast<std::uint64_t>(height) * width - used);
  return rle_canonicalize(std::move(mask));
}

struct BoxTrack {
  int bw = 0, bh = 0;
  double x0 = 0, y0 = 0, vx = 0, vy = 0;

  RleMask at(int t, int height, int width) const {
    const int x = std::clamp(static_cast<int>(std::lround(x0 + vx * t)), 0,
                             width - bw);
    const int y = std::clamp(static_cast<int>(std::lround(y0 + vy * t)), 0,
                             height - bh);
    return rect_mask(height, width, x, y, bw, bh);
  }
};

BoxTrack random_box(Rng& rng, const FixtureSpec& spec) {
  BoxTrack box;
  if (spec.box_size.has_value()) {
    box.bw = spec.box_size->first;
    box.bh = spec.box_size->second;
  } else {
    box.bw = rng.uniform_int(2, std::max(2, spec.width / 4));
    box.bh = rng.uniform_int(2, std::max(2, spec.height / 4));
  }
  if (box.bw > spec.width || box.bh > spec.height || box.bw < 1 || box.bh < 1)
    throw ValidationError("fixture spec: rectangle " + std::to_string(box.bw) +
                          "x" + std::to_string(box.bh) +
                          " larger than the canvas");
  box.x0 = rng.uniform_int(0, spec.width - box.bw);
  box.y0 = rng.uniform_int(0, spec.height - box.bh);
  box.vx = rng.uniform() * 6.0 - 3.0;
  box.vy = rng.uniform() * 6.0 - 3.0;
  return box;
}

void validate_spec(const FixtureSpec& spec) {
  if (spec.n_videos < 1) throw ValidationError("fixture spec: n_videos must be >= 1");
  if (spec.n_objects < 1) throw ValidationError("fixture spec: n_objects must be >= 1");
  if (spec.n_distractors < 0)
    throw ValidationError("fixture spec: n_distractors must be >= 0");
  if (spec.frame_count < 1)
    throw ValidationError("fixture spec: frame_count must be >= 1");
  if (!spec.box_size.has_value() && (spec.height < 8 || spec.width < 8))
    throw ValidationError("fixture spec: canvas smaller than 8x8 needs an explicit box_size");
  if (spec.height < 1 || spec.width < 1)
    throw ValidationError("fixture spec: canvas dimensions must be positive");
  if (spec.embed_dim < 2)
    throw ValidationError("fixture spec: embed_dim must be >= 2");
  if (spec.noise_sigma < 0.0)
    throw ValidationError("fixture spec: noise_sigma must be >= 0");
  if (!spec.categories.empty() &&
      static_cast<int>(spec.categories.size()) != spec.n_objects)
    throw ValidationError("fixture spec: categories must list one entry per object");
  for (int c : spec.categories)
    if (c < 0) throw ValidationError("fixture spec: negative category index");
  if (static_cast<int>(spec.occlusion_windows.size()) > spec.n_objects)
    throw ValidationError("fixture spec: more occlusion window lists than objects");
  for (const auto& windows : spec.occlusion_windows)
    for (const auto& w : windows)
      if (w.begin < 0 || w.end > spec.frame_count || w.begin >= w.end)
        throw ValidationError("fixture spec: occlusion window [" +
                              std::to_string(w.begin) + ", " +
                              std::to_string(w.end) + ") out of range");
  if (static_cast<int>(spec.impostors.size()) > spec.n_distractors)
    throw ValidationError("fixture spec: each impostor needs its own distractor slot");
  for (const auto& imp : spec.impostors) {
    if (imp.object_index < 0 || imp.object_index >= spec.n_objects)
      throw ValidationError("fixture spec: impostor references object " +
                            std::to_string(imp.object_index));
    if (imp.begin < 0 || imp.end > spec.frame_count || imp.begin >= imp.end)
      throw ValidationError("fixture spec: impostor window out of range");
  }
}

bool in_windows(const std::vector<FrameRange>& windows, int t) {
  for (const auto& w : windows)
    if (t >= w.begin && t < w.end) return true;
  return false;
}

}  // namespace

Fixture generate_fixture(const FixtureSpec& spec) {
  validate_spec(spec);

  std::vector<int> categories = spec.categories;
  if (categories.empty()) {
    categories.resize(spec.n_objects);
    for (int i = 0; i < spec.n_objects; ++i) categories[i] = i;
  }
  int n_categories = spec.n_categories;
  if (n_categories <= 0)
    n_categories = *std::max_element(categories.begin(), categories.end()) + 1;
  for (int c : categories)
    if (c >= n_categories)
      throw ValidationError("fixture spec: category index " + std::to_string(c) +
                            " >= n_categories " + std::to_string(n_categories));
  std::vector<bool> base_flags = spec.base_flags;
  if (base_flags.empty()) {
    base_flags.resize(n_categories);
    for (int c = 0; c < n_categories; ++c) base_flags[c] = (c % 2 == 0);
  }
  if (static_cast<int>(base_flags.size()) != n_categories)
    throw ValidationError("fixture spec: base_flags must list one entry per category");

  Fixture fixture;

  // Vocabulary: one unit-norm identity embedding per category.
  Rng vocab_rng = Rng::derive(spec.seed, kVocabStream);
  std::vector<std::vector<double>> identity(n_categories);
  for (int c = 0; c < n_categories; ++c)
    identity[c] = random_unit_vector(vocab_rng, spec.embed_dim);
  fixture.vocabulary.prompt_template = "this is a photo of [{}]";
  for (int c = 0; c < n_categories; ++c) {
    VocabCategory cat;
    cat.id = c + 1;
    char name[32];
    std::snprintf(name, sizeof(name), "category_%02d", c);
    cat.name = name;
    cat.is_base = base_flags[c];
    cat.embedding = identity[c];
    fixture.vocabulary.categories.push_back(std::move(cat));
  }

  // Identity class head.
  ClassHeadLayer layer;
  layer.weight = Mat(spec.embed_dim, spec.embed_dim);
  for (int i = 0; i < spec.embed_dim; ++i) layer.weight(i, i) = 1.0;
  layer.bias.assign(spec.embed_dim, 0.0);
  fixture.class_head.layers.push_back(std::move(layer));
  fixture.class_head.activation = Activation::none;

  for (const auto& cat : fixture.vocabulary.categories)
    fixture.ground_truth.categories.push_back({cat.id, cat.name});

  const int n_proposals = spec.n_objects + spec.n_distractors;
  const double sigma = spec.noise_sigma;

  for (int v = 0; v < spec.n_videos; ++v) {
    char video_name[32];
    std::snprintf(video_name, sizeof(video_name), "video_%04d", v);
    const std::string video_id = video_name;
    Rng rng = Rng::derive(spec.seed, kVideoStreamBase + static_cast<std::uint64_t>(v));

    std::vector<BoxTrack> object_boxes(spec.n_objects);
    for (auto& box : object_boxes) box = random_box(rng, spec);

    std::vector<BoxTrack> distractor_boxes(spec.n_distractors);
    std::vector<std::vector<double>> distractor_base(spec.n_distractors);
    std::vector<std::vector<double>> impostor_target(spec.n_distractors);
    for (int k = 0; k < spec.n_distractors; ++k) {
      distractor_boxes[k] = random_box(rng, spec);
      distractor_base[k] = random_unit_vector(rng, spec.embed_dim);
      impostor_target[k] = random_unit_vector(rng, spec.embed_dim);
    }

    VideoProposalFile file;
    file.video_id = video_id;
    file.height = spec.height;
    file.width = spec.width;
    file.n_queries = n_proposals;
    file.embed_dim = spec.embed_dim;

    std::vector<MaskSequence> gt_masks(spec.n_objects);
    std::vector<RleMask> stale(spec.n_objects);
    std::vector<bool> has_stale(spec.n_objects, false);

    for (int t = 0; t < spec.frame_count; ++t) {
      FrameProposals frame;
      frame.frame_index = t;
      frame.embeddings = Mat(n_proposals, spec.embed_dim);
      frame.object_scores.resize(n_proposals);
      frame.masks.resize(n_proposals);

      for (int i = 0; i < spec.n_objects; ++i) {
        const bool occluded =
            i < static_cast<int>(spec.occlusion_windows.size()) &&
            in_windows(spec.occlusion_windows[i], t);
        const RleMask rect = object_boxes[i].at(t, spec.height, spec.width);
        std::vector<double> emb;
        if (occluded) {
          emb = random_unit_vector(rng, spec.embed_dim);
          frame.object_scores[i] = kOccludedScore;
          frame.masks[i] = has_stale[i] ? stale[i] : rect;
          gt_masks[i].push_back(std::nullopt);
        } else {
          emb = identity[categories[i]];
          if (sigma > 0.0)
            for (auto& x : emb) x += sigma * rng.normal();
          frame.object_scores[i] = kVisibleScore;
          frame.masks[i] = rect;
          gt_masks[i].push_back(rect);
          stale[i] = rect;
          has_stale[i] = true;
        }
        std::copy(emb.begin(), emb.end(), frame.embeddings.row(i).begin());
      }

      for (int k = 0; k < spec.n_distractors; ++k) {
        const int j = spec.n_objects + k;
        std::vector<double> base = distractor_base[k];
        RleMask rect = distractor_boxes[k].at(t, spec.height, spec.width);
        if (k < static_cast<int>(spec.impostors.size())) {
          const auto& imp = spec.impostors[k];
          if (t >= imp.begin && t < imp.end) {
            const int span = imp.end - imp.begin - 1;
            const double u = span > 0 ? static_cast<double>(t - imp.begin) / span : 0.0;
            const auto& target_identity = identity[categories[imp.object_index]];
            std::vector<double> mix(spec.embed_dim);
            for (int x = 0; x < spec.embed_dim; ++x)
              mix[x] = (1.0 - u) * target_identity[x] + u * impostor_target[k][x];
            base = normalized(std::move(mix));
            // Same-size box as the impersonated object, at the distractor's
            // own position.
            BoxTrack sized = distractor_boxes[k];
            sized.bw = std::min(object_boxes[imp.object_index].bw, spec.width);
            sized.bh = std::min(object_boxes[imp.object_index].bh, spec.height);
            rect = sized.at(t, spec.height, spec.width);
          } else if (t >= imp.end) {
            base = impostor_target[k];
          }
        }
        if (sigma > 0.0)
          for (auto& x : base) x += sigma * rng.normal();
        std::copy(base.begin(), base.end(), frame.embeddings.row(j).begin());
        frame.object_scores[j] = kDistractorScore;
        frame.masks[j] = std::move(rect);
      }

      if (spec.with_class_scores) {
        Mat scores(n_proposals, n_categories);
        for (int j = 0; j < n_proposals; ++j) {
          const auto row = frame.embeddings.row(j);
          const double row_norm = std::sqrt(dot(row, row));
          for (int c = 0; c < n_categories; ++c) {
            const double cosine =
                row_norm > 0.0 ? dot(row, identity[c]) / row_norm : 0.0;
            scores(j, c) = 1.0 / (1.0 + std::exp(-kClassScoreTemperature * cosine));
          }
        }
        frame.class_scores = std::move(scores);
      }
      file.frames.push_back(std::move(frame));
    }

    for (int i = 0; i < spec.n_objects; ++i) {
      bool any = false;
      for (const auto& m : gt_masks[i]) any = any || m.has_value();
      if (!any)
        throw ValidationError("fixture spec: object " + std::to_string(i) +
                              " is occluded in every frame");
      GtInstance inst;
      inst.video_id = video_id;
      inst.category_id = categories[i] + 1;
      inst.masks = std::move(gt_masks[i]);
      fixture.ground_truth.annotations.push_back(std::move(inst));
    }
    fixture.ground_truth.videos.push_back(
        {video_id, spec.height, spec.width, spec.frame_count});
    fixture.proposals.push_back(std::move(file));
  }
  return fixture;
}

FixtureSpec load_fixture_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!root.is_object() || root.value("schema", "") != kSchemaVersion ||
      root.value("type", "") != "fixture_spec")
    throw FormatError(path.string() +
                      ": expected a memtrack/1 fixture_spec file");

  FixtureSpec spec;
  spec.seed = root.value("seed", 0ULL);
  spec.n_videos = root.value("n_videos", 1);
  spec.n_objects = root.value("n_objects", 1);
  spec.n_distractors = root.value("n_distractors", 0);
  spec.frame_count = root.value("frame_count", 1);
  spec.height = root.value("height", 32);
  spec.width = root.value("width", 32);
  spec.embed_dim = root.value("embed_dim", 8);
  spec.noise_sigma = root.value("noise_sigma", 0.0);
  spec.n_categories = root.value("n_categories", 0);
  spec.with_class_scores = root.value("with_class_scores", true);
  if (root.contains("categories"))
    spec.categories = root["categories"].get<std::vector<int>>();
  if (root.contains("base_flags"))
    spec.base_flags = root["base_flags"].get<std::vector<bool>>();
  if (root.contains("box_size") && !root["box_size"].is_null()) {
    const auto& box = root["box_size"];
    if (!box.is_array() || box.size() != 2)
      throw FormatError(path.string() + ": box_size must be [width, height]");
    spec.box_size = {box[0].get<int>(), box[1].get<int>()};
  }
  if (root.contains("occlusion_windows")) {
    for (const auto& windows : root["occlusion_windows"]) {
      std::vector<FrameRange> list;
      for (const auto& w : windows)
        list.push_back({w.at("begin").get<int>(), w.at("end").get<int>()});
      spec.occlusion_windows.push_back(std::move(list));
    }
  }
  if (root.contains("impostors")) {
    for (const auto& imp : root["impostors"])
      spec.impostors.push_back({imp.at("object").get<int>(),
                                imp.at("begin").get<int>(),
                                imp.at("end").get<int>()});
  }
  validate_spec(spec);
  return spec;
}

void save_fixture_spec(const FixtureSpec& spec, const std::filesystem::path& path) {
  json root;
  root["schema"] = kSchemaVersion;
  root["type"] = "fixture_spec";
  root["seed"] = spec.seed;
  root["n_videos"] = spec.n_videos;
  root["n_objects"] = spec.n_objects;
  root["n_distractors"] = spec.n_distractors;
  root["frame_count"] = spec.frame_count;
  root["height"] = spec.height;
  root["width"] = spec.width;
  root["embed_dim"] = spec.embed_dim;
  root["noise_sigma"] = spec.noise_sigma;
  if (spec.n_categories > 0) root["n_categories"] = spec.n_categories;
  root["with_class_scores"] = spec.with_class_scores;
  if (!spec.categories.empty()) root["categories"] = spec.categories;
  if (!spec.base_flags.empty()) root["base_flags"] = spec.base_flags;
  if (spec.box_size.has_value())
    root["box_size"] = {spec.box_size->first, spec.box_size->second};
  if (!spec.occlusion_windows.empty()) {
    json lists = json::array();
    for (const auto& windows : spec.occlusion_windows) {
      json list = json::array();
      for (const auto& w : windows)
        list.push_back({{"begin", w.begin}, {"end", w.end}});
      lists.push_back(std::move(list));
    }
    root["occlusion_windows"] = std::move(lists);
  }
  if (!spec.impostors.empty()) {
    json list = json::array();
    for (const auto& imp : spec.impostors)
      list.push_back({{"object", imp.object_index},
                      {"begin", imp.begin},
                      {"end", imp.end}});
    root["impostors"] = std::move(list);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << root.dump(1) << '\n';
}

namespace {

struct BruteForceState {
  const WeightMatrix* weights;
  int rows, cols, target_pairs;
  std::vector<int> current;  // row -> col or -1
  std::vector<char> used_col;
  std::vector<int> best;
  double best_total = 0.0;
  bool found = false;

  double total_of(const std::vector<int>& assignment) const {
    double total = 0.0;
    for (int r = 0; r < rows; ++r)
      if (assignment[r] >= 0) total += (*weights)(r, assignment[r]);
    return total;
  }

  void search(int row, int assigned, int skips_left) {
    if (row == rows) {
      const double total = total_of(current);
      if (!found || total > best_total) {
        found = true;
        best_total = total;
        best = current;
      }
      return;
    }
    for (int c = 0; c < cols; ++c) {
      if (used_col[c]) continue;
      used_col[c] = 1;
      current[row] = c;
      search(row + 1, assigned + 1, skips_left);
      current[row] = -1;
      used_col[c] = 0;
    }
    if (skips_left > 0) search(row + 1, assigned, skips_left - 1);
  }
};

}  // namespace

BruteForceResult brute_force_assignment(const WeightMatrix& weights) {
  const int rows = weights.rows();
  const int cols = weights.cols();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (!std::isfinite(weights(r, c)))
        throw ValidationError("brute_force_assignment: non-finite weight");
  BruteForceResult result;
  if (rows == 0 || cols == 0) return result;
  if (std::min(rows, cols) > 8)
    throw OracleSizeError("brute_force_assignment caps at min(rows, cols) <= 8");

  BruteForceState state;
  state.weights = &weights;
  state.rows = rows;
  state.cols = cols;
  state.target_pairs = std::min(rows, cols);
  state.current.assign(rows, -1);
  state.used_col.assign(cols, 0);
  state.search(0, 0, rows - state.target_pairs);

  for (int r = 0; r < rows; ++r) {
    if (state.best[r] >= 0) {
      result.pairs.emplace_back(r, state.best[r]);
      result.total += weights(r, state.best[r]);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Dense reference evaluation. Deliberately straight-line and self-contained:
// its own mask decoding, IoU and AP code, sharing nothing with the evaluator
// or mask modules it cross-checks.
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kDensePixelCap = 10'000'000;

std::vector<std::uint8_t> decode_dense(const RleMask& mask) {
  const std::uint64_t total =
      static_cast<std::uint64_t>(mask.height) * static_cast<std::uint64_t>(mask.width);
  std::vector<std::uint8_t> flat(total, 0);
  std::uint64_t pos = 0;
  bool value = false;
  for (auto count : mask.counts) {
    if (pos + count > total)
      throw ValidationError("dense_reference_eval: corrupt mask");
    if (value)
      std::fill(flat.begin() + pos, flat.begin() + pos + count, 1);
    pos += count;
    value = !value;
  }
  if (pos != total) throw ValidationError("dense_reference_eval: corrupt mask");
  return flat;
}

double dense_sequence_iou(const MaskSequence& a, const MaskSequence& b) {
  const std::size_t frames = std::max(a.size(), b.size());
  std::uint64_t inter = 0, uni = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    const bool has_a = t < a.size() && a[t].has_value();
    const bool has_b = t < b.size() && b[t].has_value();
    if (has_a && has_b) {
      const auto da = decode_dense(*a[t]);
      const auto db = decode_dense(*b[t]);
      if (da.size() != db.size())
        throw DimensionError("dense_reference_eval: frame dimension mismatch");
      for (std::size_t p = 0; p < da.size(); ++p) {
        if (da[p] && db[p]) ++inter;
        if (da[p] || db[p]) ++uni;
      }
    } else if (has_a) {
      for (auto px : decode_dense(*a[t])) uni += px;
    } else if (has_b) {
      for (auto px : decode_dense(*b[t])) uni += px;
    }
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double dense_ap(const std::vector<int>& flags, int n_gt, int recall_points) {
  const int n = static_cast<int>(flags.size());
  std::vector<double> recalls(n), precisions(n);
  int tp = 0;
  for (int i = 0; i < n; ++i) {
    tp += flags[i];
    recalls[i] = static_cast<double>(tp) / n_gt;
    precisions[i] = static_cast<double>(tp) / (i + 1);
  }
  double total = 0.0;
  for (int j = 0; j < recall_points; ++j) {
    const double level = static_cast<double>(j) / (recall_points - 1);
    double best = 0.0;
    for (int i = 0; i < n; ++i)
      if (recalls[i] >= level && precisions[i] > best) best = precisions[i];
    total += best;
  }
  return total / recall_points;
}

}  // namespace

EvalReport dense_reference_eval(const std::vector<Prediction>& preds,
                                const std::vector<GtInstance>& gts,
                                const Vocabulary& vocab, const EvalConfig& cfg) {
  validate_vocabulary(vocab);

  // Desk-scale cap: pixels per video.
  std::map<std::string, std::uint64_t> video_pixels;
  auto tally = [&](const std::string& video, const MaskSequence& seq) {
    for (const auto& m : seq)
      if (m.has_value()) {
        video_pixels[video] +=
            static_cast<std::uint64_t>(m->height) * static_cast<std::uint64_t>(m->width);
        break;
      }
  };
  for (const auto& gt : gts) tally(gt.video_id, gt.masks);
  for (const auto& p : preds) tally(p.video_id, p.masks);
  std::uint64_t max_frames = 0;
  for (const auto& gt : gts) max_frames = std::max<std::uint64_t>(max_frames, gt.masks.size());
  for (const auto& [video, per_frame] : video_pixels)
    if (per_frame * std::max<std::uint64_t>(max_frames, 1) > kDensePixelCap)
      throw OracleSizeError("dense_reference_eval size cap exceeded for " + video);

  // Per-video confidence cap, ties by input order.
  std::map<std::string, std::vector<std::size_t>> by_video;
  for (std::size_t i = 0; i < preds.size(); ++i)
    by_video[preds[i].video_id].push_back(i);
  std::vector<std::size_t> kept;
  for (auto& [video, idx] : by_video) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (preds[a].confidence != preds[b].confidence)
        return preds[a].confidence > preds[b].confidence;
      return a < b;
    });
    if (static_cast<int>(idx.size()) > cfg.max_dets_per_video)
      idx.resize(cfg.max_dets_per_video);
    kept.insert(kept.end(), idx.begin(), idx.end());
  }

  EvalReport report;
  std::vector<double> all_aps, base_aps, novel_aps;
  for (const auto& cat : vocab.categories) {
    std::vector<std::size_t> cat_preds;
    for (auto i : kept)
      if (preds[i].category_id == cat.id) cat_preds.push_back(i);
    std::sort(cat_preds.begin(), cat_preds.end(), [&](std::size_t a, std::size_t b) {
      if (preds[a].confidence != preds[b].confidence)
        return preds[a].confidence > preds[b].confidence;
      return a < b;
    });
    std::vector<std::size_t> cat_gts;
    for (std::size_t g = 0; g < gts.size(); ++g)
      if (gts[g].category_id == cat.id) cat_gts.push_back(g);

    CategoryCounts counts;
    counts.n_gt = static_cast<int>(cat_gts.size());
    counts.n_pred = static_cast<int>(cat_preds.size());
    if (cat_gts.empty()) {
      report.counts[cat.id] = counts;
      continue;
    }

    // IoU is threshold independent; compute each (pred, gt) pair once.
    Mat iou(static_cast<int>(cat_preds.size()), static_cast<int>(cat_gts.size()));
    for (std::size_t pi = 0; pi < cat_preds.size(); ++pi)
      for (std::size_t gi = 0; gi < cat_gts.size(); ++gi) {
        const auto& pred = preds[cat_preds[pi]];
        const auto& gt = gts[cat_gts[gi]];
        iou(static_cast<int>(pi), static_cast<int>(gi)) =
            pred.video_id == gt.video_id
                ? dense_sequence_iou(pred.masks, gt.masks)
                : 0.0;
      }

    double ap_sum = 0.0;
    for (std::size_t ti = 0; ti < cfg.iou_thresholds.size(); ++ti) {
      const double threshold = cfg.iou_thresholds[ti];
      std::vector<char> gt_used(cat_gts.size(), 0);
      std::vector<int> flags(cat_preds.size(), 0);
      for (std::size_t pi = 0; pi < cat_preds.size(); ++pi) {
        int best = -1;
        double best_iou = 0.0;
        for (std::size_t gi = 0; gi < cat_gts.size(); ++gi) {
          if (gt_used[gi]) continue;
          if (gts[cat_gts[gi]].video_id != preds[cat_preds[pi]].video_id) continue;
          const double value = iou(static_cast<int>(pi), static_cast<int>(gi));
          if (value >= threshold && value > best_iou) {
            best_iou = value;
            best = static_cast<int>(gi);
          }
        }
        if (best >= 0) {
          gt_used[best] = 1;
          flags[pi] = 1;
        }
      }
      ap_sum += dense_ap(flags, counts.n_gt, cfg.recall_points);
      if (ti == 0)
        for (int f : flags) (f ? counts.tp : counts.fp) += 1;
    }
    const double ap = ap_sum / static_cast<double>(cfg.iou_thresholds.size());
    report.per_category_ap[cat.id] = ap;
    report.counts[cat.id] = counts;
    all_aps.push_back(ap);
    (cat.is_base ? base_aps : novel_aps).push_back(ap);
  }

  auto mean_of = [](const std::vector<double>& values) -> std::optional<double> {
    if (values.empty()) return std::nullopt;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  };
  report.map = mean_of(all_aps);
  report.map_base = mean_of(base_aps);
  report.map_novel = mean_of(novel_aps);
  return report;
}

}  // namespace memtrack::synth
