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

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "memtrack/dataio.hpp"
#include "memtrack/errors.hpp"
#include "memtrack/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace memtrack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitInternal = 3;

struct RunConfig {
  // tracker
  double alpha = 0.7;
  std::string similarity = "inner";
  bool no_gate = false;
  double mask_threshold = 0.0;
  // classifier
  double temperature = 50.0;
  std::string temperature_mode = "multiply";
  std::string classify = "memory";
  // prediction export
  int top_k = 10;
  double min_score = 0.0;
  bool include_object_score = false;
  // evaluation
  int max_dets = 100;
  std::string iou_thresholds = "0.50:0.05:0.95";
  int recall_points = 101;
  bool trapezoid_ap = false;
  // execution
  int jobs = 1;

  TrackerConfig tracker() const {
    TrackerConfig cfg;
    cfg.alpha = alpha;
    if (similarity == "inner")
      cfg.similarity = SimilarityMode::inner_product;
    else if (similarity == "cosine")
      cfg.similarity = SimilarityMode::cosine;
    else
      throw ValidationError("--similarity must be inner or cosine");
    cfg.gate_with_object_score = !no_gate;
    cfg.mask_emit_threshold = mask_threshold;
    return cfg;
  }

  ClassifierConfig classifier() const {
    ClassifierConfig cfg;
    cfg.temperature = temperature;
    if (temperature_mode == "multiply")
      cfg.temperature_mode = TemperatureMode::multiply;
    else if (temperature_mode == "divide")
      cfg.temperature_mode = TemperatureMode::divide;
    else
      throw ValidationError("--temperature-mode must be multiply or divide");
    return cfg;
  }

  EvalConfig eval() const {
    EvalConfig cfg;
    cfg.iou_thresholds = parse_thresholds(iou_thresholds);
    cfg.recall_points = recall_points;
    cfg.max_dets_per_video = max_dets;
    cfg.trapezoid_ap = trapezoid_ap;
    return cfg;
  }

  PredictionExportOptions exporter() const {
    PredictionExportOptions opts;
    opts.top_k = top_k;
    opts.min_score = min_score;
    opts.include_object_score = include_object_score;
    return opts;
  }

  static std::vector<double> parse_thresholds(const std::string& text) {
    double start = 0, step = 0, stop = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &step, &stop) != 3 ||
        step <= 0)
      throw ValidationError("--iou-thresholds must be start:step:stop, e.g. 0.50:0.05:0.95");
    std::vector<double> thresholds;
    for (int i = 0;; ++i) {
      const double t = start + step * i;
      if (t > stop + 1e-9) break;
      thresholds.push_back(t);
    }
    if (thresholds.empty())
      throw ValidationError("--iou-thresholds describes an empty range");
    return thresholds;
  }
};

int default_jobs() {
  if (const char* env = std::getenv("MEMTRACK_JOBS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Exceptions are
// rethrown on the calling thread; result slots are index-addressed so the
// output order never depends on scheduling.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void print_summary(const json& summary) { std::cout << summary.dump() << "\n"; }

json optional_json(const std::optional<double>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

// Tracks, classifies and exports one proposal file worth of predictions.
std::vector<Prediction> run_pipeline_for_video(const VideoProposalFile& proposals,
                                               const Vocabulary& vocab,
                                               const ClassHead& head,
                                               const RunConfig& run) {
  TrackResult result = track_video(proposals.frames, run.tracker());
  if (run.classify == "memory")
    classify_tracks(result.bank, result.tracklets, head, vocab, run.classifier());
  else if (run.classify == "average")
    classify_average(proposals.frames, result.tracklets);
  else
    throw ValidationError("--classify must be memory or average");
  return tracklets_to_predictions(proposals.video_id, result.tracklets, vocab,
                                  run.exporter());
}

struct FixturePaths {
  fs::path ground_truth;
  fs::path vocabulary;
  fs::path class_head;
  std::vector<fs::path> proposals;
};

FixturePaths write_fixture(const synth::Fixture& fixture, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec && !fs::exists(out_dir))
    throw IoError("cannot create directory " + out_dir.string());
  FixturePaths paths;
  paths.ground_truth = out_dir / "ground_truth.json";
  paths.vocabulary = out_dir / "vocabulary.json";
  paths.class_head = out_dir / "class_head.json";
  save_ground_truth(fixture.ground_truth, paths.ground_truth);
  save_vocabulary(fixture.vocabulary, paths.vocabulary);
  save_class_head(fixture.class_head, paths.class_head);
  for (const auto& video : fixture.proposals) {
    fs::path p = out_dir / ("proposals_" + video.video_id + ".json");
    save_proposals(video, p);
    paths.proposals.push_back(std::move(p));
  }
  return paths;
}

json evaluate_to_summary(const std::vector<Prediction>& preds,
                         const GroundTruthFile& gt, const Vocabulary& vocab,
                         const RunConfig& run, const fs::path& report_path,
                         const fs::path& table_path) {
  std::vector<GtInstance> instances = gt.annotations;
  std::vector<std::string> video_ids;
  for (const auto& v : gt.videos) video_ids.push_back(v.video_id);
  const EvalReport report = evaluate(preds, instances, vocab, run.eval(), video_ids);
  if (!report_path.empty()) write_report_json(report, vocab, report_path);
  if (!table_path.empty()) {
    std::ofstream out(table_path);
    if (!out) throw IoError("cannot open " + table_path.string() + " for writing");
    out << format_report_table(report, vocab);
  }
  json summary;
  summary["mAP"] = optional_json(report.map);
  summary["mAP_b"] = optional_json(report.map_base);
  summary["mAP_n"] = optional_json(report.map_novel);
  summary["n_predictions"] = preds.size();
  summary["n_gt"] = instances.size();
  return summary;
}

// Applies config-file values to any option the user did not pass explicitly.
void merge_config_file(CLI::App* cmd, const fs::path& path, RunConfig& run) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!root.is_object() || root.value("schema", "") != kSchemaVersion ||
      root.value("type", "") != "run_config")
    throw FormatError(path.string() + ": expected a memtrack/1 run_config file");

  auto apply = [&](const char* flag, const char* key, auto& field) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    if (opt != nullptr && opt->count() > 0) return;  // flag overrides file
    auto it = root.find(key);
    if (it == root.end()) return;
    field = it->get<std::decay_t<decltype(field)>>();
  };
  apply("--alpha", "alpha", run.alpha);
  apply("--similarity", "similarity", run.similarity);
  apply("--no-gate", "no_gate", run.no_gate);
  apply("--mask-threshold", "mask_threshold", run.mask_threshold);
  apply("--temperature", "temperature", run.temperature);
  apply("--temperature-mode", "temperature_mode", run.temperature_mode);
  apply("--classify", "classify", run.classify);
  apply("--top-k", "top_k", run.top_k);
  apply("--min-score", "min_score", run.min_score);
  apply("--include-object-score", "include_object_score", run.include_object_score);
  apply("--max-dets", "max_dets", run.max_dets);
  apply("--iou-thresholds", "iou_thresholds", run.iou_thresholds);
  apply("--recall-points", "recall_points", run.recall_points);
  apply("--trapezoid-ap", "trapezoid_ap", run.trapezoid_ap);
  apply("--jobs", "jobs", run.jobs);
}

void add_tracker_options(CLI::App* cmd, RunConfig& run) {
  cmd->add_option("--alpha", run.alpha, "memory update factor in [0, 1]");
  cmd->add_option("--similarity", run.similarity, "inner|cosine");
  cmd->add_flag("--no-gate", run.no_gate, "disable object-score gating of memory updates");
  cmd->add_option("--mask-threshold", run.mask_threshold,
                  "suppress per-frame masks below this object score");
}

void add_classifier_options(CLI::App* cmd, RunConfig& run) {
  cmd->add_option("--temperature", run.temperature, "cosine temperature");
  cmd->add_option("--temperature-mode", run.temperature_mode, "multiply|divide");
  cmd->add_option("--classify", run.classify, "memory|average");
  cmd->add_option("--top-k", run.top_k, "categories exported per track");
  cmd->add_option("--min-score", run.min_score, "export confidence floor (strict)");
  cmd->add_flag("--include-object-score", run.include_object_score,
                "multiply exported confidence by the mean object score");
}

void add_eval_options(CLI::App* cmd, RunConfig& run) {
  cmd->add_option("--max-dets", run.max_dets, "per-video prediction cap");
  cmd->add_option("--iou-thresholds", run.iou_thresholds, "start:step:stop");
  cmd->add_option("--recall-points", run.recall_points, "recall interpolation points");
  cmd->add_flag("--trapezoid-ap", run.trapezoid_ap,
                "trapezoidal AUC instead of interpolated AP");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memtrack: memory-induced tracking, open-vocabulary "
               "classification and VIS evaluation"};
  app.require_subcommand(1);

  RunConfig run;
  run.jobs = default_jobs();
  fs::path config_path;

  // gen-fixture
  auto* gen = app.add_subcommand("gen-fixture", "generate a synthetic fixture");
  fs::path gen_spec, gen_out;
  gen->add_option("--spec", gen_spec, "fixture spec JSON")->required();
  gen->add_option("--out", gen_out, "output directory")->required();

  // track
  auto* track = app.add_subcommand("track", "track proposals into predictions");
  std::vector<fs::path> track_proposals;
  fs::path track_vocab, track_head, track_out;
  track->add_option("--proposals", track_proposals, "proposal file(s)")->required();
  track->add_option("--vocab", track_vocab, "vocabulary file")->required();
  track->add_option("--head", track_head, "class head weights file")->required();
  track->add_option("--out", track_out, "predictions output file")->required();
  track->add_option("--config", config_path, "run_config JSON; flags override");
  track->add_option("--jobs", run.jobs, "parallel videos (env MEMTRACK_JOBS)");
  add_tracker_options(track, run);
  add_classifier_options(track, run);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "score predictions against ground truth");
  fs::path eval_pred, eval_gt, eval_vocab, eval_report, eval_table;
  eval->add_option("--pred", eval_pred, "predictions file")->required();
  eval->add_option("--gt", eval_gt, "ground truth file")->required();
  eval->add_option("--vocab", eval_vocab, "vocabulary file")->required();
  eval->add_option("--report", eval_report, "write the JSON report here");
  eval->add_option("--table", eval_table, "write the plain-text table here");
  eval->add_option("--config", config_path, "run_config JSON; flags override");
  add_eval_options(eval, run);

  // e2e
  auto* e2e = app.add_subcommand("e2e", "gen-fixture, track and evaluate in one run");
  fs::path e2e_spec, e2e_workdir = "e2e_work";
  e2e->add_option("--spec", e2e_spec, "fixture spec JSON")->required();
  e2e->add_option("--workdir", e2e_workdir, "working directory (default e2e_work)");
  e2e->add_option("--config", config_path, "run_config JSON; flags override");
  e2e->add_option("--jobs", run.jobs, "parallel videos (env MEMTRACK_JOBS)");
  add_tracker_options(e2e, run);
  add_classifier_options(e2e, run);
  add_eval_options(e2e, run);

  // validate
  auto* validate = app.add_subcommand("validate", "schema-check any memtrack file");
  fs::path validate_target;
  validate->add_option("--file", validate_target, "file to validate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    if (!config_path.empty()) merge_config_file(active, config_path, run);

    if (gen->parsed()) {
      const synth::FixtureSpec spec = synth::load_fixture_spec(gen_spec);
      const synth::Fixture fixture = synth::generate_fixture(spec);
      const FixturePaths paths = write_fixture(fixture, gen_out);
      json summary;
      summary["command"] = "gen-fixture";
      summary["out"] = gen_out.string();
      summary["files"] = 3 + paths.proposals.size();
      summary["videos"] = fixture.proposals.size();
      summary["categories"] = fixture.vocabulary.categories.size();
      summary["annotations"] = fixture.ground_truth.annotations.size();
      print_summary(summary);
      return kExitOk;
    }

    if (track->parsed()) {
      const Vocabulary vocab = load_vocabulary(track_vocab);
      const ClassHead head = load_class_head(track_head);
      std::vector<VideoProposalFile> videos(track_proposals.size());
      std::vector<std::vector<Prediction>> per_video(track_proposals.size());
      parallel_for(static_cast<int>(track_proposals.size()), run.jobs, [&](int i) {
        videos[i] = load_proposals(track_proposals[i]);
        per_video[i] = run_pipeline_for_video(videos[i], vocab, head, run);
      });
      std::vector<Prediction> predictions;
      std::size_t n_tracks = 0;
      for (std::size_t i = 0; i < per_video.size(); ++i) {
        n_tracks += videos[i].n_queries;
        predictions.insert(predictions.end(), per_video[i].begin(), per_video[i].end());
      }
      write_predictions(predictions, track_out);
      json summary;
      summary["command"] = "track";
      summary["videos"] = videos.size();
      summary["tracks"] = n_tracks;
      summary["predictions"] = predictions.size();
      summary["out"] = track_out.string();
      print_summary(summary);
      return kExitOk;
    }

    if (eval->parsed()) {
      const PredictionFile preds = load_predictions(eval_pred);
      const GroundTruthFile gt = load_ground_truth(eval_gt);
      const Vocabulary vocab = load_vocabulary(eval_vocab);
      json summary = evaluate_to_summary(preds.predictions, gt, vocab, run,
                                         eval_report, eval_table);
      summary["command"] = "evaluate";
      print_summary(summary);
      return kExitOk;
    }

    if (e2e->parsed()) {
      const synth::FixtureSpec spec = synth::load_fixture_spec(e2e_spec);
      const synth::Fixture fixture = synth::generate_fixture(spec);
      const FixturePaths paths = write_fixture(fixture, e2e_workdir);

      std::vector<VideoProposalFile> videos(paths.proposals.size());
      std::vector<std::vector<Prediction>> per_video(paths.proposals.size());
      const Vocabulary vocab = load_vocabulary(paths.vocabulary);
      const ClassHead head = load_class_head(paths.class_head);
      parallel_for(static_cast<int>(paths.proposals.size()), run.jobs, [&](int i) {
        videos[i] = load_proposals(paths.proposals[i]);
        per_video[i] = run_pipeline_for_video(videos[i], vocab, head, run);
      });
      std::vector<Prediction> predictions;
      for (const auto& chunk : per_video)
        predictions.insert(predictions.end(), chunk.begin(), chunk.end());
      write_predictions(predictions, e2e_workdir / "predictions.json");

      const GroundTruthFile gt = load_ground_truth(paths.ground_truth);
      json summary = evaluate_to_summary(predictions, gt, vocab, run,
                                         e2e_workdir / "report.json", "");
      summary["command"] = "e2e";
      summary["workdir"] = e2e_workdir.string();
      print_summary(summary);
      return kExitOk;
    }

    if (validate->parsed()) {
      std::string type;
      {
        std::ifstream in(validate_target);
        if (!in) throw IoError("cannot open " + validate_target.string());
        json root;
        try {
          root = json::parse(in);
        } catch (const json::parse_error& e) {
          throw FormatError(validate_target.string() + ": " + e.what());
        }
        type = root.is_object() ? root.value("type", "") : "";
      }
      if (type == "fixture_spec")
        synth::load_fixture_spec(validate_target);
      else
        type = validate_file(validate_target);
      json summary;
      summary["command"] = "validate";
      summary["file"] = validate_target.string();
      summary["type"] = type;
      summary["ok"] = true;
      print_summary(summary);
      return kExitOk;
    }

    std::cerr << "error: no subcommand\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DimensionError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const OracleSizeError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
