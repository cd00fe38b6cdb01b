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

#include "memtrack/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "memtrack/errors.hpp"

namespace memtrack {

namespace {

// Clamped away from 0 and 1 so scores stay strictly inside (0, 1) even when
// the logit saturates the double representation.
double sigmoid(double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  return std::clamp(s, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
}

}  // namespace

void validate_vocabulary(const Vocabulary& vocab) {
  if (vocab.categories.empty())
    throw ValidationError("vocabulary must contain at least one category");
  std::set<std::string> names;
  std::set<int> ids;
  const int dim = vocab.embed_dim();
  for (const auto& cat : vocab.categories) {
    if (!names.insert(cat.name).second)
      throw ValidationError("duplicate category name: " + cat.name);
    if (!ids.insert(cat.id).second)
      throw ValidationError("duplicate category id: " + std::to_string(cat.id));
    if (static_cast<int>(cat.embedding.size()) != dim)
      throw ValidationError("category " + cat.name + ": embedding dimension " +
                            std::to_string(cat.embedding.size()) + " != " +
                            std::to_string(dim));
    double norm_sq = 0.0;
    for (double x : cat.embedding) norm_sq += x * x;
    if (norm_sq == 0.0)
      throw ValidationError("category " + cat.name + ": zero embedding");
  }
}

Mat class_head_forward(const Mat& queries, const ClassHead& head) {
  if (head.layers.empty()) throw ValidationError("class head has no layers");
  int expected = queries.cols();
  for (std::size_t l = 0; l < head.layers.size(); ++l) {
    const auto& layer = head.layers[l];
    if (layer.weight.cols() != expected)
      throw ValidationError("class head layer " + std::to_string(l) +
                            ": input dimension " +
                            std::to_string(layer.weight.cols()) + " != " +
                            std::to_string(expected));
    if (static_cast<int>(layer.bias.size()) != layer.weight.rows())
      throw ValidationError("class head layer " + std::to_string(l) +
                            ": bias size " + std::to_string(layer.bias.size()) +
                            " != output dimension " +
                            std::to_string(layer.weight.rows()));
    expected = layer.weight.rows();
  }

  Mat current = queries;
  for (std::size_t l = 0; l < head.layers.size(); ++l) {
    const auto& layer = head.layers[l];
    const int out_dim = layer.weight.rows();
    Mat next(current.rows(), out_dim);
    for (int i = 0; i < current.rows(); ++i) {
      const auto in_row = current.row(i);
      for (int o = 0; o < out_dim; ++o)
        next(i, o) = dot(layer.weight.row(o), in_row) + layer.bias[o];
    }
    const bool last = l + 1 == head.layers.size();
    if (!last && head.activation == Activation::relu) {
      for (double& x : next.data()) x = x > 0.0 ? x : 0.0;
    }
    current = std::move(next);
  }
  return current;
}

Mat classification_scores(const Mat& class_embeddings, const Vocabulary& vocab,
                          const ClassifierConfig& cfg) {
  validate_vocabulary(vocab);
  if (!(cfg.temperature > 0.0))
    throw ValidationError("temperature must be positive");
  if (class_embeddings.cols() != vocab.embed_dim())
    throw DimensionError("classification_scores: class embedding dimension " +
                         std::to_string(class_embeddings.cols()) +
                         " != text embedding dimension " +
                         std::to_string(vocab.embed_dim()));

  const int n = class_embeddings.rows();
  const int n_cats = vocab.size();
  std::vector<double> text_norm(n_cats);
  for (int j = 0; j < n_cats; ++j) {
    const auto& e = vocab.categories[j].embedding;
    text_norm[j] = std::sqrt(dot(e, e));
  }

  Mat scores(n, n_cats);
  for (int i = 0; i < n; ++i) {
    const auto row = class_embeddings.row(i);
    const double row_norm = std::sqrt(dot(row, row));
    for (int j = 0; j < n_cats; ++j) {
      const double denom = row_norm * text_norm[j];
      const double cosine =
          denom > 0.0 ? dot(row, vocab.categories[j].embedding) / denom : 0.0;
      const double logit = cfg.temperature_mode == TemperatureMode::multiply
                               ? cfg.temperature * cosine
                               : cosine / cfg.temperature;
      scores(i, j) = sigmoid(logit);
    }
  }
  return scores;
}

void classify_tracks(const MemoryBank& bank, std::vector<Tracklet>& tracklets,
                     const ClassHead& head, const Vocabulary& vocab,
                     const ClassifierConfig& cfg) {
  if (bank.size() != static_cast<int>(tracklets.size()))
    throw ValidationError("classify_tracks: " + std::to_string(tracklets.size()) +
                          " tracklets but " + std::to_string(bank.size()) +
                          " memory slots");
  const Mat class_embeddings = class_head_forward(bank.slots, head);
  const Mat scores = classification_scores(class_embeddings, vocab, cfg);
  for (std::size_t i = 0; i < tracklets.size(); ++i) {
    const auto row = scores.row(static_cast<int>(i));
    tracklets[i].class_scores.assign(row.begin(), row.end());
  }
}

void classify_average(const std::vector<FrameProposals>& frames,
                      std::vector<Tracklet>& tracklets) {
  if (frames.empty()) throw ValidationError("classify_average: no frames");
  int n_cats = -1;
  for (const auto& frame : frames) {
    if (!frame.class_scores.has_value())
      throw ValidationError("classify_average: frame " +
                            std::to_string(frame.frame_index) +
                            " carries no per-frame class scores");
    if (n_cats < 0) n_cats = frame.class_scores->cols();
    if (frame.class_scores->cols() != n_cats)
      throw ValidationError("classify_average: inconsistent category count at frame " +
                            std::to_string(frame.frame_index));
  }

  for (auto& track : tracklets) {
    if (track.per_frame.size() != frames.size())
      throw ValidationError("classify_average: tracklet " +
                            std::to_string(track.track_id) + " covers " +
                            std::to_string(track.per_frame.size()) +
                            " frames, expected " + std::to_string(frames.size()));
    std::vector<double> mean(n_cats, 0.0);
    for (const auto& entry : track.per_frame) {
      const auto row = frames[entry.frame_index].class_scores->row(entry.proposal_index);
      for (int c = 0; c < n_cats; ++c) mean[c] += row[c];
    }
    for (double& m : mean) m /= static_cast<double>(frames.size());
    track.class_scores = std::move(mean);
  }
}

}  // namespace memtrack
