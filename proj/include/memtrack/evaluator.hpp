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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memtrack/classifier.hpp"
#include "memtrack/mask.hpp"

namespace memtrack {

// Per-frame mask sequence; an absent entry means the object is not visible
// (or not predicted) in that frame.
using MaskSequence = std::vector<std::optional<RleMask>>;

struct GtInstance {
  std::string video_id;
  int category_id = 0;
  MaskSequence masks;
};

struct Prediction {
  std::string video_id;
  int category_id = 0;
  double confidence = 0.0;
  MaskSequence masks;
  int track_id = -1;
};

inline std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

struct EvalConfig {
  std::vector<double> iou_thresholds = default_iou_thresholds();
  int recall_points = 101;
  int max_dets_per_video = 100;
  // Trapezoidal area under the raw PR curve instead of the interpolated
  // mean; a sensitivity-check alternative, off by default.
  bool trapezoid_ap = false;
};

struct CategoryCounts {
  int n_gt = 0;
  int n_pred = 0;
  // Matched / unmatched tallies at the lowest IoU threshold.
  int tp = 0;
  int fp = 0;
};

struct EvalReport {
  // Defined APs only; categories without ground truth are absent.
  std::map<int, double> per_category_ap;
  std::optional<double> map;
  std::optional<double> map_base;
  std::optional<double> map_novel;
  std::map<int, CategoryCounts> counts;
};

// Spatio-temporal IoU: sum of per-frame intersections over sum of per-frame
// unions; absent masks count as empty, and a zero denominator yields 0.
// Sequences of different lengths are aligned by padding with absent frames.
double st_iou(const MaskSequence& pred_masks, const MaskSequence& gt_masks);

// Greedy matcher for a single category: predictions must be pre-sorted by
// descending confidence; each one matches the unmatched same-video ground
// truth with the highest st_iou when that IoU reaches the threshold. Returns
// one TP/FP flag per prediction, in the given order.
std::vector<bool> match_category(const std::vector<Prediction>& preds,
                                 const std::vector<GtInstance>& gts,
                                 double threshold);

// Interpolated average precision: mean over `recall_points` evenly spaced
// recall thresholds of the best precision achieved at or beyond each one.
// Requires n_gt >= 1.
double average_precision(const std::vector<bool>& tp_flags, int n_gt,
                         int recall_points);

// Trapezoidal area under the raw precision-recall curve.
double average_precision_trapezoid(const std::vector<bool>& tp_flags, int n_gt);

// Full metric: per-category AP averaged over the IoU thresholds, then mAP /
// mAP_b / mAP_n as means of the defined APs (overall, base-only,
// novel-only). `known_videos`, when non-empty, defines the valid video set;
// otherwise it is derived from the ground truth. Throws ValidationError on
// unknown category or video ids.
EvalReport evaluate(const std::vector<Prediction>& preds,
                    const std::vector<GtInstance>& gts,
                    const Vocabulary& vocab, const EvalConfig& cfg,
                    std::span<const std::string> known_videos = {});

}  // namespace memtrack
