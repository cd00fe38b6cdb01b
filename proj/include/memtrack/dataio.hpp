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
#include <string>
#include <vector>

#include "memtrack/classifier.hpp"
#include "memtrack/evaluator.hpp"
#include "memtrack/tracker.hpp"

namespace memtrack {

// Every memtrack file starts with this schema tag.
inline constexpr char kSchemaVersion[] = "memtrack/1";

struct VideoInfo {
  std::string video_id;
  int height = 0;
  int width = 0;
  int frame_count = 0;
};

// One video's proposal stream (the tracker's input).
struct VideoProposalFile {
  std::string video_id;
  int height = 0;
  int width = 0;
  int n_queries = 0;
  int embed_dim = 0;
  std::vector<FrameProposals> frames;
};

struct GtCategory {
  int id = 0;
  std::string name;
};

struct GroundTruthFile {
  std::vector<VideoInfo> videos;
  std::vector<GtCategory> categories;
  std::vector<GtInstance> annotations;
};

struct PredictionFile {
  std::vector<Prediction> predictions;
};

VideoProposalFile load_proposals(const std::filesystem::path& path);
GroundTruthFile load_ground_truth(const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path);
ClassHead load_class_head(const std::filesystem::path& path);
PredictionFile load_predictions(const std::filesystem::path& path);

void save_proposals(const VideoProposalFile& file, const std::filesystem::path& path);
void save_ground_truth(const GroundTruthFile& file, const std::filesystem::path& path);
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
void save_class_head(const ClassHead& head, const std::filesystem::path& path);

struct PredictionExportOptions {
  int top_k = 10;          // categories exported per tracklet
  double min_score = 0.0;  // strict lower bound on the exported confidence
  bool include_object_score = false;  // multiply by the mean object score
};

// One Prediction record per exported (tracklet, category) pair, sorted by
// track id, then descending confidence, then category id.
std::vector<Prediction> tracklets_to_predictions(
    const std::string& video_id, const std::vector<Tracklet>& tracklets,
    const Vocabulary& vocab, const PredictionExportOptions& opts);

void write_predictions(const std::vector<Prediction>& predictions,
                       const std::filesystem::path& path);

// Evaluation report output: JSON and an aligned plain-text table.
void write_report_json(const EvalReport& report, const Vocabulary& vocab,
                       const std::filesystem::path& path);
std::string format_report_table(const EvalReport& report, const Vocabulary& vocab);

// Schema check for any memtrack file; returns the file's "type" field.
std::string validate_file(const std::filesystem::path& path);

}  // namespace memtrack
