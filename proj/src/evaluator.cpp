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

#include "memtrack/evaluator.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "memtrack/errors.hpp"

namespace memtrack {

double st_iou(const MaskSequence& pred_masks, const MaskSequence& gt_masks) {
  const std::size_t frames = std::max(pred_masks.size(), gt_masks.size());
  std::uint64_t inter_sum = 0;
  std::uint64_t union_sum = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    const std::optional<RleMask>* p = t < pred_masks.size() ? &pred_masks[t] : nullptr;
    const std::optional<RleMask>* g = t < gt_masks.size() ? &gt_masks[t] : nullptr;
    const bool has_p = p && p->has_value();
    const bool has_g = g && g->has_value();
    if (has_p && has_g) {
      const std::uint64_t inter = intersection_area(**p, **g);
      inter_sum += inter;
      union_sum += mask_area(**p) + mask_area(**g) - inter;
    } else if (has_p) {
      union_sum += mask_area(**p);
    } else if (has_g) {
      union_sum += mask_area(**g);
    }
  }
  if (union_sum == 0) return 0.0;
  return static_cast<double>(inter_sum) / static_cast<double>(union_sum);
}

std::vector<bool> match_category(const std::vector<Prediction>& preds,
                                 const std::vector<GtInstance>& gts,
                                 double threshold) {
  std::vector<bool> flags(preds.size(), false);
  std::vector<char> gt_matched(gts.size(), 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_matched[g] || gts[g].video_id != preds[i].video_id) continue;
      const double iou = st_iou(preds[i].masks, gts[g].masks);
      if (iou >= threshold && iou > best_iou) {
        best_iou = iou;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0) {
      gt_matched[best] = 1;
      flags[i] = true;
    }
  }
  return flags;
}

double average_precision(const std::vector<bool>& tp_flags, int n_gt,
                         int recall_points) {
  if (n_gt < 1) throw ValidationError("average_precision: n_gt must be >= 1");
  if (recall_points < 2)
    throw ValidationError("average_precision: need at least 2 recall points");

  // Cumulative precision/recall, then the best precision at or beyond each
  // recall level (the PR envelope).
  const int n = static_cast<int>(tp_flags.size());
  std::vector<double> recall(n), precision(n);
  int tp = 0;
  for (int i = 0; i < n; ++i) {
    if (tp_flags[i]) ++tp;
    recall[i] = static_cast<double>(tp) / n_gt;
    precision[i] = static_cast<double>(tp) / (i + 1);
  }
  for (int i = n - 2; i >= 0; --i)
    precision[i] = std::max(precision[i], precision[i + 1]);

  double total = 0.0;
  int cursor = 0;
  for (int j = 0; j < recall_points; ++j) {
    const double level = static_cast<double>(j) / (recall_points - 1);
    while (cursor < n && recall[cursor] < level) ++cursor;
    if (cursor < n) total += precision[cursor];
  }
  return total / recall_points;
}

double average_precision_trapezoid(const std::vector<bool>& tp_flags, int n_gt) {
  if (n_gt < 1) throw ValidationError("average_precision: n_gt must be >= 1");
  double area = 0.0;
  double prev_recall = 0.0;
  double prev_precision = 1.0;
  int tp = 0;
  for (std::size_t i = 0; i < tp_flags.size(); ++i) {
    if (tp_flags[i]) ++tp;
    const double recall = static_cast<double>(tp) / n_gt;
    const double precision = static_cast<double>(tp) / static_cast<double>(i + 1);
    area += (recall - prev_recall) * 0.5 * (precision + prev_precision);
    prev_recall = recall;
    prev_precision = precision;
  }
  return area;
}

namespace {

struct IndexedPrediction {
  const Prediction* pred;
  std::size_t input_index;
};

bool confidence_order(const IndexedPrediction& a, const IndexedPrediction& b) {
  if (a.pred->confidence != b.pred->confidence)
    return a.pred->confidence > b.pred->confidence;
  return a.input_index < b.input_index;
}

std::optional<double> mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace

EvalReport evaluate(const std::vector<Prediction>& preds,
                    const std::vector<GtInstance>& gts,
                    const Vocabulary& vocab, const EvalConfig& cfg,
                    std::span<const std::string> known_videos) {
  validate_vocabulary(vocab);
  if (cfg.iou_thresholds.empty())
    throw ValidationError("evaluate: no IoU thresholds");
  for (std::size_t i = 0; i < cfg.iou_thresholds.size(); ++i) {
    const double t = cfg.iou_thresholds[i];
    if (!(t > 0.0 && t <= 1.0) ||
        (i > 0 && t <= cfg.iou_thresholds[i - 1]))
      throw ValidationError(
          "evaluate: IoU thresholds must be strictly increasing within (0, 1]");
  }

  std::set<int> category_ids;
  for (const auto& cat : vocab.categories) category_ids.insert(cat.id);
  std::set<std::string> video_ids(known_videos.begin(), known_videos.end());
  if (video_ids.empty())
    for (const auto& gt : gts) video_ids.insert(gt.video_id);

  for (const auto& gt : gts)
    if (!category_ids.count(gt.category_id))
      throw ValidationError("ground truth references unknown category id " +
                            std::to_string(gt.category_id));
  for (const auto& pred : preds) {
    if (!category_ids.count(pred.category_id))
      throw ValidationError("prediction references unknown category id " +
                            std::to_string(pred.category_id));
    if (!video_ids.count(pred.video_id))
      throw ValidationError("prediction references unknown video id " +
                            pred.video_id);
    if (!(pred.confidence >= 0.0 && pred.confidence <= 1.0))
      throw ValidationError("prediction confidence outside [0, 1]");
  }

  // Per-video confidence cap.
  std::map<std::string, std::vector<IndexedPrediction>> by_video;
  for (std::size_t i = 0; i < preds.size(); ++i)
    by_video[preds[i].video_id].push_back({&preds[i], i});
  std::vector<IndexedPrediction> kept;
  for (auto& [video, list] : by_video) {
    std::sort(list.begin(), list.end(), confidence_order);
    if (static_cast<int>(list.size()) > cfg.max_dets_per_video)
      list.resize(cfg.max_dets_per_video);
    kept.insert(kept.end(), list.begin(), list.end());
  }

  std::map<int, std::vector<IndexedPrediction>> preds_by_category;
  for (const auto& entry : kept)
    preds_by_category[entry.pred->category_id].push_back(entry);
  std::map<int, std::vector<GtInstance>> gts_by_category;
  for (const auto& gt : gts) gts_by_category[gt.category_id].push_back(gt);

  EvalReport report;
  std::vector<double> all_aps, base_aps, novel_aps;
  for (const auto& cat : vocab.categories) {
    auto git = gts_by_category.find(cat.id);
    const int n_gt = git == gts_by_category.end()
                         ? 0
                         : static_cast<int>(git->second.size());
    auto pit = preds_by_category.find(cat.id);
    const int n_pred =
        pit == preds_by_category.end() ? 0 : static_cast<int>(pit->second.size());
    CategoryCounts counts;
    counts.n_gt = n_gt;
    counts.n_pred = n_pred;
    if (n_gt == 0) {
      // No ground truth: AP undefined, category excluded from every mean.
      report.counts[cat.id] = counts;
      continue;
    }

    std::vector<Prediction> cat_preds;
    if (pit != preds_by_category.end()) {
      std::sort(pit->second.begin(), pit->second.end(), confidence_order);
      cat_preds.reserve(pit->second.size());
      for (const auto& entry : pit->second) cat_preds.push_back(*entry.pred);
    }

    double ap_sum = 0.0;
    for (std::size_t ti = 0; ti < cfg.iou_thresholds.size(); ++ti) {
      const std::vector<bool> flags =
          match_category(cat_preds, git->second, cfg.iou_thresholds[ti]);
      ap_sum += cfg.trapezoid_ap
                    ? average_precision_trapezoid(flags, n_gt)
                    : average_precision(flags, n_gt, cfg.recall_points);
      if (ti == 0) {
        for (bool f : flags) (f ? counts.tp : counts.fp) += 1;
      }
    }
    const double ap = ap_sum / static_cast<double>(cfg.iou_thresholds.size());

    report.per_category_ap[cat.id] = ap;
    report.counts[cat.id] = counts;
    all_aps.push_back(ap);
    (cat.is_base ? base_aps : novel_aps).push_back(ap);
  }

  report.map = mean_of(all_aps);
  report.map_base = mean_of(base_aps);
  report.map_novel = mean_of(novel_aps);
  return report;
}

}  // namespace memtrack
