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

#include <string>
#include <vector>

#include "memtrack/matrix.hpp"
#include "memtrack/tracker.hpp"

namespace memtrack {

enum class Activation { relu, none };

struct ClassHeadLayer {
  Mat weight;                // out x in
  std::vector<double> bias;  // out
};

// Small MLP mapping memory queries into the text-embedding space. The
// activation runs between layers, never after the last.
struct ClassHead {
  std::vector<ClassHeadLayer> layers;
  Activation activation = Activation::relu;
};

struct VocabCategory {
  int id = 0;
  std::string name;
  bool is_base = true;
  std::vector<double> embedding;
};

// Category names with precomputed text embeddings and the base/novel split.
struct Vocabulary {
  std::string prompt_template;
  std::vector<VocabCategory> categories;

  int size() const { return static_cast<int>(categories.size()); }
  int embed_dim() const {
    return categories.empty() ? 0 : static_cast<int>(categories[0].embedding.size());
  }
};

// Validates name uniqueness, non-empty category list, constant embedding
// dimension and non-zero embedding rows. Throws ValidationError.
void validate_vocabulary(const Vocabulary& vocab);

enum class TemperatureMode { multiply, divide };

struct ClassifierConfig {
  double temperature = 50.0;
  TemperatureMode temperature_mode = TemperatureMode::multiply;
};

// Affine-then-activation composition; the final layer is affine only.
// Throws ValidationError when the layer dimensions do not chain or the input
// does not match the first layer.
Mat class_head_forward(const Mat& queries, const ClassHead& head);

// score(i, j) = sigmoid(tau(cos(e_cls_i, e_text_j))) with tau(x) = eps * x in
// multiply mode and x / eps in divide mode. Zero-norm class-embedding rows
// have cosine 0 everywhere and score exactly 0.5.
Mat classification_scores(const Mat& class_embeddings, const Vocabulary& vocab,
                          const ClassifierConfig& cfg);

// Fills each tracklet's class_scores from the final memory bank: slot i's
// class embedding scores every vocabulary category.
void classify_tracks(const MemoryBank& bank, std::vector<Tracklet>& tracklets,
                     const ClassHead& head, const Vocabulary& vocab,
                     const ClassifierConfig& cfg);

// Baseline: tracklet scores are the arithmetic mean of the associated
// proposals' per-frame class scores. Every frame must carry class_scores.
void classify_average(const std::vector<FrameProposals>& frames,
                      std::vector<Tracklet>& tracklets);

}  // namespace memtrack
