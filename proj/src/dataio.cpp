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

#include "memtrack/dataio.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "memtrack/errors.hpp"

namespace memtrack {

using nlohmann::json;

namespace {

constexpr std::uint64_t kMaxMaskPixels = 1ULL << 32;

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_file(const json& value, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << value.dump(1) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw FormatError(where + ": missing required field \"" + key + "\"");
  return *it;
}

int require_int(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer())
    throw FormatError(where + ": field \"" + key + "\" must be an integer");
  return v.get<int>();
}

double require_number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number())
    throw FormatError(where + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

std::string require_string(const json& obj, const char* key,
                           const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string())
    throw FormatError(where + ": field \"" + key + "\" must be a string");
  return v.get<std::string>();
}

bool require_bool(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_boolean())
    throw FormatError(where + ": field \"" + key + "\" must be a boolean");
  return v.get<bool>();
}

const json& require_array(const json& obj, const char* key,
                          const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_array())
    throw FormatError(where + ": field \"" + key + "\" must be an array");
  return v;
}

std::vector<double> number_vector(const json& arr, const std::string& where) {
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) throw FormatError(where + ": expected a number array");
    out.push_back(v.get<double>());
  }
  return out;
}

Mat matrix_from_json(const json& arr, const std::string& where) {
  std::vector<std::vector<double>> rows;
  rows.reserve(arr.size());
  for (const auto& row : arr) {
    if (!row.is_array()) throw FormatError(where + ": expected an array of rows");
    rows.push_back(number_vector(row, where));
  }
  try {
    return Mat::from_rows(rows);
  } catch (const DimensionError& e) {
    throw FormatError(where + ": " + e.what());
  }
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (double v : m.row(i)) row.push_back(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

// Schema guard: requires the memtrack/1 tag and the expected type; unknown
// top-level keys are tolerated with a warning.
void check_schema(const json& root, const std::string& expected_type,
                  const std::set<std::string>& known_keys,
                  const std::string& where) {
  if (!root.is_object()) throw FormatError(where + ": top level must be an object");
  const std::string schema = require_string(root, "schema", where);
  if (schema != kSchemaVersion)
    throw FormatError(where + ": unsupported schema \"" + schema +
                      "\", expected \"" + kSchemaVersion + "\"");
  const std::string type = require_string(root, "type", where);
  if (type != expected_type)
    throw FormatError(where + ": file type \"" + type + "\", expected \"" +
                      expected_type + "\"");
  for (const auto& [key, value] : root.items()) {
    if (!known_keys.count(key))
      std::fprintf(stderr, "warning: %s: ignoring unknown key \"%s\"\n",
                   where.c_str(), key.c_str());
  }
}

RleMask rle_from_json(const json& value, int height, int width,
                      const std::string& where) {
  if (!value.is_object())
    throw FormatError(where + ": mask must be an object");
  const json& size = require_array(value, "size", where);
  if (size.size() != 2 || !size[0].is_number_integer() || !size[1].is_number_integer())
    throw FormatError(where + ": mask \"size\" must be [height, width]");
  RleMask mask;
  mask.height = size[0].get<int>();
  mask.width = size[1].get<int>();
  if (mask.height != height || mask.width != width)
    throw ValidationError(where + ": mask size " + std::to_string(mask.height) +
                          "x" + std::to_string(mask.width) +
                          " does not match video size " + std::to_string(height) +
                          "x" + std::to_string(width));
  if (mask.pixel_count() > kMaxMaskPixels)
    throw ValidationError(where + ": mask exceeds the 2^32 pixel limit");
  const json& counts = require_array(value, "counts", where);
  for (const auto& c : counts) {
    if (!c.is_number_integer() || c.get<std::int64_t>() < 0)
      throw FormatError(where + ": mask counts must be non-negative integers");
    mask.counts.push_back(c.get<std::uint64_t>());
  }
  try {
    return rle_canonicalize(std::move(mask));
  } catch (const DimensionError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

json rle_to_json(const RleMask& mask) {
  json out;
  out["size"] = {mask.height, mask.width};
  out["counts"] = mask.counts;
  return out;
}

MaskSequence mask_sequence_from_json(const json& arr, int height, int width,
                                     const std::string& where) {
  MaskSequence seq;
  seq.reserve(arr.size());
  for (std::size_t t = 0; t < arr.size(); ++t) {
    if (arr[t].is_null()) {
      seq.emplace_back(std::nullopt);
    } else {
      seq.emplace_back(rle_from_json(arr[t], height, width,
                                     where + ", frame " + std::to_string(t)));
    }
  }
  return seq;
}

json mask_sequence_to_json(const MaskSequence& seq) {
  json arr = json::array();
  for (const auto& m : seq) {
    if (m.has_value())
      arr.push_back(rle_to_json(*m));
    else
      arr.push_back(nullptr);
  }
  return arr;
}

}  // namespace

VideoProposalFile load_proposals(const std::filesystem::path& path) {
  const std::string where = path.string();
  const json root = parse_file(path);
  check_schema(root, "proposals",
               {"schema", "type", "video_id", "height", "width", "n_queries",
                "embed_dim", "frames"},
               where);

  VideoProposalFile file;
  file.video_id = require_string(root, "video_id", where);
  file.height = require_int(root, "height", where);
  file.width = require_int(root, "width", where);
  file.n_queries = require_int(root, "n_queries", where);
  file.embed_dim = require_int(root, "embed_dim", where);
  if (file.height <= 0 || file.width <= 0)
    throw ValidationError(where + ": video dimensions must be positive");
  if (file.n_queries <= 0 || file.embed_dim <= 0)
    throw ValidationError(where + ": n_queries and embed_dim must be positive");

  const json& frames = require_array(root, "frames", where);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const std::string frame_where = where + ": frame " + std::to_string(t);
    const json& f = frames[t];
    if (!f.is_object()) throw FormatError(frame_where + ": must be an object");
    FrameProposals fp;
    fp.frame_index = require_int(f, "frame_index", frame_where);
    if (fp.frame_index != static_cast<int>(t))
      throw ValidationError(frame_where + ": frame_index " +
                            std::to_string(fp.frame_index) +
                            " breaks the contiguous 0..T-1 ordering");
    fp.embeddings = matrix_from_json(require_array(f, "embeddings", frame_where),
                                     frame_where);
    if (fp.embeddings.rows() != file.n_queries)
      throw ValidationError(frame_where + ": " +
                            std::to_string(fp.embeddings.rows()) +
                            " embeddings, expected n_queries = " +
                            std::to_string(file.n_queries));
    if (fp.embeddings.cols() != file.embed_dim)
      throw ValidationError(frame_where + ": embedding dimension " +
                            std::to_string(fp.embeddings.cols()) +
                            ", expected embed_dim = " +
                            std::to_string(file.embed_dim));
    fp.object_scores =
        number_vector(require_array(f, "object_scores", frame_where), frame_where);
    if (static_cast<int>(fp.object_scores.size()) != file.n_queries)
      throw ValidationError(frame_where + ": " +
                            std::to_string(fp.object_scores.size()) +
                            " object scores, expected " +
                            std::to_string(file.n_queries));
    for (double s : fp.object_scores)
      if (!(s >= 0.0 && s <= 1.0))
        throw ValidationError(frame_where + ": object score " +
                              std::to_string(s) + " outside [0, 1]");
    const json& masks = require_array(f, "masks", frame_where);
    if (static_cast<int>(masks.size()) != file.n_queries)
      throw ValidationError(frame_where + ": " + std::to_string(masks.size()) +
                            " masks, expected " + std::to_string(file.n_queries));
    for (std::size_t i = 0; i < masks.size(); ++i)
      fp.masks.push_back(rle_from_json(masks[i], file.height, file.width,
                                       frame_where + ", mask " + std::to_string(i)));
    if (f.contains("class_scores") && !f["class_scores"].is_null()) {
      Mat scores = matrix_from_json(f["class_scores"], frame_where);
      if (scores.rows() != file.n_queries)
        throw ValidationError(frame_where + ": class_scores rows " +
                              std::to_string(scores.rows()) + " != n_queries");
      for (double s : scores.data())
        if (!(s >= 0.0 && s <= 1.0))
          throw ValidationError(frame_where + ": class score outside [0, 1]");
      fp.class_scores = std::move(scores);
    }
    file.frames.push_back(std::move(fp));
  }
  if (file.frames.empty()) throw ValidationError(where + ": no frames");
  return file;
}

void save_proposals(const VideoProposalFile& file,
                    const std::filesystem::path& path) {
  json root;
  root["schema"] = kSchemaVersion;
  root["type"] = "proposals";
  root["video_id"] = file.video_id;
  root["height"] = file.height;
  root["width"] = file.width;
  root["n_queries"] = file.n_queries;
  root["embed_dim"] = file.embed_dim;
  json frames = json::array();
  for (const auto& fp : file.frames) {
    json f;
    f["frame_index"] = fp.frame_index;
    f["embeddings"] = matrix_to_json(fp.embeddings);
    f["object_scores"] = fp.object_scores;
    json masks = json::array();
    for (const auto& m : fp.masks) masks.push_back(rle_to_json(m));
    f["masks"] = std::move(masks);
    if (fp.class_scores.has_value())
      f["class_scores"] = matrix_to_json(*fp.class_scores);
    frames.push_back(std::move(f));
  }
  root["frames"] = std::move(frames);
  write_file(root, path);
}

GroundTruthFile load_ground_truth(const std::filesystem::path& path) {
  const std::string where = path.string();
  const json root = parse_file(path);
  check_schema(root, "ground_truth",
               {"schema", "type", "videos", "categories", "annotations"}, where);

  GroundTruthFile file;
  std::set<std::string> video_ids;
  for (const auto& v : require_array(root, "videos", where)) {
    VideoInfo info;
    info.video_id = require_string(v, "video_id", where + ": videos");
    info.height = require_int(v, "height", where + ": videos");
    info.width = require_int(v, "width", where + ": videos");
    info.frame_count = require_int(v, "frame_count", where + ": videos");
    if (info.height <= 0 || info.width <= 0 || info.frame_count <= 0)
      throw ValidationError(where + ": video " + info.video_id +
                            " has non-positive dimensions or frame count");
    if (!video_ids.insert(info.video_id).second)
      throw ValidationError(where + ": duplicate video id " + info.video_id);
    file.videos.push_back(std::move(info));
  }

  std::set<int> category_ids;
  for (const auto& c : require_array(root, "categories", where)) {
    GtCategory cat;
    cat.id = require_int(c, "id", where + ": categories");
    cat.name = require_string(c, "name", where + ": categories");
    if (!category_ids.insert(cat.id).second)
      throw ValidationError(where + ": duplicate category id " +
                            std::to_string(cat.id));
    file.categories.push_back(std::move(cat));
  }

  const json& annotations = require_array(root, "annotations", where);
  for (std::size_t a = 0; a < annotations.size(); ++a) {
    const std::string ann_where = where + ": annotation " + std::to_string(a);
    const json& ann = annotations[a];
    GtInstance inst;
    inst.video_id = require_string(ann, "video_id", ann_where);
    inst.category_id = require_int(ann, "category_id", ann_where);
    if (!video_ids.count(inst.video_id))
      throw ValidationError(ann_where + ": unknown video id " + inst.video_id);
    if (!category_ids.count(inst.category_id))
      throw ValidationError(ann_where + ": unknown category id " +
                            std::to_string(inst.category_id));
    const auto video = std::find_if(
        file.videos.begin(), file.videos.end(),
        [&](const VideoInfo& v) { return v.video_id == inst.video_id; });
    const json& masks = require_array(ann, "masks", ann_where);
    if (static_cast<int>(masks.size()) != video->frame_count)
      throw ValidationError(ann_where + ": " + std::to_string(masks.size()) +
                            " mask frames, expected " +
                            std::to_string(video->frame_count));
    inst.masks =
        mask_sequence_from_json(masks, video->height, video->width, ann_where);
    bool any = false;
    for (const auto& m : inst.masks)
      if (m.has_value() && mask_area(*m) > 0) any = true;
    if (!any)
      throw ValidationError(ann_where + ": no frame carries a non-empty mask");
    file.annotations.push_back(std::move(inst));
  }
  return file;
}

void save_ground_truth(const GroundTruthFile& file,
                       const std::filesystem::path& path) {
  json root;
  root["schema"] = kSchemaVersion;
  root["type"] = "ground_truth";
  json videos = json::array();
  for (const auto& v : file.videos) {
    videos.push_back({{"video_id", v.video_id},
                      {"height", v.height},
                      {"width", v.width},
                      {"frame_count", v.frame_count}});
  }
  root["videos"] = std::move(videos);
  json categories = json::array();
  for (const auto& c : file.categories)
    categories.push_back({{"id", c.id}, {"name", c.name}});
  root["categories"] = std::move(categories);
  json annotations = json::array();
  for (const auto& ann : file.annotations) {
    json a;
    a["video_id"] = ann.video_id;
    a["category_id"] = ann.category_id;
    a["masks"] = mask_sequence_to_json(ann.masks);
    annotations.push_back(std::move(a));
  }
  root["annotations"] = std::move(annotations);
  write_file(root, path);
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  const std::string where = path.string();
  const json root = parse_file(path);
  check_schema(root, "vocabulary",
               {"schema", "type", "prompt_template", "categories"}, where);

  Vocabulary vocab;
  vocab.prompt_template = require_string(root, "prompt_template", where);
  for (const auto& c : require_array(root, "categories", where)) {
    VocabCategory cat;
    cat.id = require_int(c, "id", where + ": categories");
    cat.name = require_string(c, "name", where + ": categories");
    cat.is_base = require_bool(c, "base", where + ": categories");
    cat.embedding = number_vector(require_array(c, "embedding", where + ": categories"),
                                  where + ": category " + cat.name);
    vocab.categories.push_back(std::move(cat));
  }
  try {
    validate_vocabulary(vocab);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
  return vocab;
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  json root;
  root["schema"] = kSchemaVersion;
  root["type"] = "vocabulary";
  root["prompt_template"] = vocab.prompt_template;
  json categories = json::array();
  for (const auto& c : vocab.categories) {
    categories.push_back({{"id", c.id},
                          {"name", c.name},
                          {"base", c.is_base},
                          {"embedding", c.embedding}});
  }
  root["categories"] = std::move(categories);
  write_file(root, path);
}

ClassHead load_class_head(const std::filesystem::path& path) {
  const std::string where = path.string();
  const json root = parse_file(path);
  check_schema(root, "class_head", {"schema", "type", "activation", "layers"},
               where);

  ClassHead head;
  const std::string act = require_string(root, "activation", where);
  if (act == "relu")
    head.activation = Activation::relu;
  else if (act == "none")
    head.activation = Activation::none;
  else
    throw FormatError(where + ": activation must be \"relu\" or \"none\"");

  const json& layers = require_array(root, "layers", where);
  if (layers.empty()) throw ValidationError(where + ": class head has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string layer_where = where + ": layer " + std::to_string(l);
    ClassHeadLayer layer;
    layer.weight = matrix_from_json(require_array(layers[l], "weight", layer_where),
                                    layer_where);
    layer.bias = number_vector(require_array(layers[l], "bias", layer_where),
                               layer_where);
    if (layer.weight.rows() == 0 || layer.weight.cols() == 0)
      throw ValidationError(layer_where + ": empty weight matrix");
    if (static_cast<int>(layer.bias.size()) != layer.weight.rows())
      throw ValidationError(layer_where + ": bias size " +
                            std::to_string(layer.bias.size()) +
                            " != output dimension " +
                            std::to_string(layer.weight.rows()));
    if (l > 0 && layer.weight.cols() != head.layers.back().weight.rows())
      throw ValidationError(layer_where + ": input dimension " +
                            std::to_string(layer.weight.cols()) +
                            " does not chain with previous output " +
                            std::to_string(head.layers.back().weight.rows()));
    head.layers.push_back(std::move(layer));
  }
  return head;
}

void save_class_head(const ClassHead& head, const std::filesystem::path& path) {
  json root;
  root["schema"] = kSchemaVersion;
  root["type"] = "class_head";
  root["activation"] = head.activation == Activation::relu ? "relu" : "none";
  json layers = json::array();
  for (const auto& layer : head.layers) {
    layers.push_back(
        {{"weight", matrix_to_json(layer.weight)}, {"bias", layer.bias}});
  }
  root["layers"] = std::move(layers);
  write_file(root, path);
}

PredictionFile load_predictions(const std::filesystem::path& path) {
  const std::string where = path.string();
  const json root = parse_file(path);
  check_schema(root, "predictions", {"schema", "type", "predictions"}, where);

  PredictionFile file;
  const json& preds = require_array(root, "predictions", where);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const std::string pred_where = where + ": prediction " + std::to_string(i);
    const json& p = preds[i];
    Prediction pred;
    pred.video_id = require_string(p, "video_id", pred_where);
    pred.category_id = require_int(p, "category_id", pred_where);
    pred.confidence = require_number(p, "confidence", pred_where);
    if (!(pred.confidence >= 0.0 && pred.confidence <= 1.0))
      throw ValidationError(pred_where + ": confidence " +
                            std::to_string(pred.confidence) + " outside [0, 1]");
    if (p.contains("track_id")) pred.track_id = p["track_id"].get<int>();
    const json& masks = require_array(p, "masks", pred_where);
    int height = 0, width = 0;
    for (const auto& m : masks) {
      if (!m.is_null()) {
        const json& size = require_array(m, "size", pred_where);
        height = size[0].get<int>();
        width = size[1].get<int>();
        break;
      }
    }
    if (height > 0)
      pred.masks = mask_sequence_from_json(masks, height, width, pred_where);
    else
      pred.masks.assign(masks.size(), std::nullopt);
    file.predictions.push_back(std::move(pred));
  }
  return file;
}

std::vector<Prediction> tracklets_to_predictions(
    const std::string& video_id, const std::vector<Tracklet>& tracklets,
    const Vocabulary& vocab, const PredictionExportOptions& opts) {
  std::vector<Prediction> out;
  for (const auto& track : tracklets) {
    if (track.class_scores.size() != static_cast<std::size_t>(vocab.size()))
      throw ValidationError("tracklet " + std::to_string(track.track_id) +
                            " has " + std::to_string(track.class_scores.size()) +
                            " class scores for a vocabulary of " +
                            std::to_string(vocab.size()));
    std::vector<int> order(vocab.size());
    for (int c = 0; c < vocab.size(); ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (track.class_scores[a] != track.class_scores[b])
        return track.class_scores[a] > track.class_scores[b];
      return vocab.categories[a].id < vocab.categories[b].id;
    });

    MaskSequence masks;
    masks.reserve(track.per_frame.size());
    for (const auto& frame : track.per_frame) masks.push_back(frame.mask);

    int exported = 0;
    for (int c : order) {
      if (exported >= opts.top_k) break;
      double confidence = track.class_scores[c];
      if (opts.include_object_score) confidence *= track.mean_object_score;
      if (!(confidence > opts.min_score)) continue;
      Prediction pred;
      pred.video_id = video_id;
      pred.category_id = vocab.categories[c].id;
      pred.confidence = confidence;
      pred.masks = masks;
      pred.track_id = track.track_id;
      out.push_back(std::move(pred));
      ++exported;
    }
  }
  return out;
}

void write_predictions(const std::vector<Prediction>& predictions,
                       const std::filesystem::path& path) {
  json root;
  root["schema"] = kSchemaVersion;
  root["type"] = "predictions";
  json preds = json::array();
  for (const auto& p : predictions) {
    json entry;
    entry["video_id"] = p.video_id;
    entry["category_id"] = p.category_id;
    entry["confidence"] = p.confidence;
    entry["track_id"] = p.track_id;
    entry["masks"] = mask_sequence_to_json(p.masks);
    preds.push_back(std::move(entry));
  }
  root["predictions"] = std::move(preds);
  write_file(root, path);
}

namespace {

json optional_to_json(const std::optional<double>& v) {
  if (v.has_value()) return *v;
  return nullptr;
}

}  // namespace

void write_report_json(const EvalReport& report, const Vocabulary& vocab,
                       const std::filesystem::path& path) {
  json root;
  root["schema"] = kSchemaVersion;
  root["type"] = "eval_report";
  root["mAP"] = optional_to_json(report.map);
  root["mAP_b"] = optional_to_json(report.map_base);
  root["mAP_n"] = optional_to_json(report.map_novel);
  json per_category = json::object();
  for (const auto& cat : vocab.categories) {
    json entry;
    entry["name"] = cat.name;
    entry["base"] = cat.is_base;
    auto ap = report.per_category_ap.find(cat.id);
    entry["ap"] = ap == report.per_category_ap.end() ? json(nullptr) : json(ap->second);
    auto counts = report.counts.find(cat.id);
    if (counts != report.counts.end()) {
      entry["n_gt"] = counts->second.n_gt;
      entry["n_pred"] = counts->second.n_pred;
      entry["tp"] = counts->second.tp;
      entry["fp"] = counts->second.fp;
    }
    per_category[std::to_string(cat.id)] = std::move(entry);
  }
  root["per_category"] = std::move(per_category);
  write_file(root, path);
}

std::string format_report_table(const EvalReport& report, const Vocabulary& vocab) {
  std::ostringstream out;
  auto fmt = [](const std::optional<double>& v) {
    if (!v.has_value()) return std::string("     n/a");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%8.4f", *v);
    return std::string(buf);
  };

  std::size_t name_width = 8;
  for (const auto& cat : vocab.categories)
    name_width = std::max(name_width, cat.name.size());

  out << std::string(name_width, ' ') << "  split       AP   n_gt n_pred\n";
  for (const auto& cat : vocab.categories) {
    auto ap = report.per_category_ap.find(cat.id);
    std::optional<double> value;
    if (ap != report.per_category_ap.end()) value = ap->second;
    const auto counts = report.counts.find(cat.id);
    out << cat.name << std::string(name_width - cat.name.size(), ' ') << "  "
        << (cat.is_base ? "base " : "novel") << " " << fmt(value);
    if (counts != report.counts.end()) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), " %6d %6d", counts->second.n_gt,
                    counts->second.n_pred);
      out << buf;
    }
    out << "\n";
  }
  out << std::string(name_width, '-') << "\n";
  out << "mAP   " << fmt(report.map) << "\n";
  out << "mAP_b " << fmt(report.map_base) << "\n";
  out << "mAP_n " << fmt(report.map_novel) << "\n";
  return out.str();
}

std::string validate_file(const std::filesystem::path& path) {
  const json root = parse_file(path);
  if (!root.is_object())
    throw FormatError(path.string() + ": top level must be an object");
  const std::string where = path.string();
  const std::string schema = require_string(root, "schema", where);
  if (schema != kSchemaVersion)
    throw FormatError(where + ": unsupported schema \"" + schema + "\"");
  const std::string type = require_string(root, "type", where);
  if (type == "proposals")
    load_proposals(path);
  else if (type == "ground_truth")
    load_ground_truth(path);
  else if (type == "vocabulary")
    load_vocabulary(path);
  else if (type == "class_head")
    load_class_head(path);
  else if (type == "predictions")
    load_predictions(path);
  else
    throw FormatError(where + ": unknown file type \"" + type + "\"");
  return type;
}

}  // namespace memtrack
