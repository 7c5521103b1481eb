/* Copyright 2026 The corrdet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corrdet/bounds.hpp"
#include "corrdet/corrloss.hpp"
#include "corrdet/errors.hpp"
#include "corrdet/ingest.hpp"
#include "corrdet/metrics.hpp"
#include "corrdet/pipeline.hpp"
#include "corrdet/report.hpp"
#include "corrdet/softrank.hpp"

namespace corrdet::cli {
namespace {

using nlohmann::json;

struct Inputs {
  std::string gt;
  std::string dets;
  std::string raw_dets;
  std::string out;
  PipelineConfig pipeline;
  bool nms_free = false;
  double tp_iou = 0.5;
  double iou_floor = 0.5;
  std::string assigner = "max-iou";
  int threads = 1;
};

struct LossArgs {
  std::string coef = "concordance";
  double lambda = 0.2;
  double epsilon = 2.0;
  int n = 10;
  int trials = 100;
  int steps = 500;
  double lr = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

struct SynthArgs {
  std::uint64_t seed = 0;
  int images = 20;
  int classes = 3;
  SynthParams params;
  std::string out;
};

int default_threads() {
  if (const char* env = std::getenv("CORRDET_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const SchemaError*>(&e)) return "SchemaError";
  if (dynamic_cast<const ReferenceError*>(&e)) return "ReferenceError";
  if (dynamic_cast<const DimensionError*>(&e)) return "DimensionError";
  if (dynamic_cast<const EmptyEvaluation*>(&e)) return "EmptyEvaluation";
  if (dynamic_cast<const NoGroundTruth*>(&e)) return "NoGroundTruth";
  if (dynamic_cast<const DegenerateInput*>(&e)) return "DegenerateInput";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "InvalidArgument";
  return "Error";
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PositiveAssigner parse_assigner(const std::string& s) {
  if (s == "max-iou") return PositiveAssigner::kMaxIou;
  if (s == "greedy") return PositiveAssigner::kGreedyOneToOne;
  throw UsageError("--assigner must be max-iou or greedy");
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

json pipeline_json(const PipelineConfig& p) {
  return {{"score_thr", p.score_thr},
          {"nms_iou", p.nms_iou},
          {"top_k", p.top_k},
          {"nms", p.nms_enabled ? "enabled" : "disabled"}};
}

// Final detections either read directly or produced by the pipeline.
struct Loaded {
  Dataset gt;
  std::optional<RawDetectionsByImage> raw;
  std::optional<std::vector<FinalDetection>> finals;
  std::string mode;
};

Loaded load_inputs(Inputs& in, bool need_raw) {
  if (in.gt.empty()) throw UsageError("--gt is required");
  if (in.dets.empty() == in.raw_dets.empty()) {
    throw UsageError("give exactly one of --dets or --raw-dets");
  }
  if (need_raw && in.raw_dets.empty()) {
    throw UsageError("this level needs --raw-dets");
  }
  in.pipeline.nms_enabled = !in.nms_free;
  in.pipeline.validate();

  Loaded l;
  l.gt = load_gt(in.gt);
  if (!in.dets.empty()) {
    l.finals = load_final_dets(in.dets, l.gt);
    l.mode = "final";
  } else {
    l.raw = load_raw_dets(in.raw_dets, l.gt);
    l.finals = postprocess_all(*l.raw, in.pipeline, in.threads);
    l.mode = in.nms_free ? "pipeline_nms_free" : "pipeline";
  }
  return l;
}

json base_report(const char* command, const Loaded& l, const Inputs& in) {
  json j{{"command", command}, {"mode", l.mode}};
  if (l.raw) j["pipeline"] = pipeline_json(in.pipeline);
  return j;
}

int cmd_eval(Inputs& in, const std::string& pr_csv, std::ostream& out) {
  const Loaded l = load_inputs(in, false);
  json report = base_report("eval", l, in);
  const ApResult ap = coco_ap(*l.finals, l.gt.gts);
  report["ap"] = to_json(ap, l.gt.categories);
  emit(dump_report(report), in.out, out);
  if (!pr_csv.empty()) {
    write_text(pr_csv, pr_curves_csv(*l.finals, l.gt.gts, l.gt.categories,
                                     coco_iou_thresholds()));
  }
  return 0;
}

int cmd_corr(Inputs& in, const std::string& level_name, std::ostream& out) {
  const CorrelationLevel level = parse_level(level_name);
  const Loaded l = load_inputs(in, level == CorrelationLevel::kImage);
  json report = base_report("corr", l, in);
  report["level"] = std::string(to_string(level));
  CorrelationReport r;
  if (level == CorrelationLevel::kImage) {
    const auto samples = group_images(*l.raw, l.gt.gts);
    r = beta_img(samples, {in.iou_floor, parse_assigner(in.assigner),
                           in.threads});
    report["iou_floor"] = in.iou_floor;
    report["assigner"] = in.assigner;
  } else {
    r = beta_cls(*l.finals, l.gt.gts, in.tp_iou);
    report["tp_iou_thr"] = in.tp_iou;
  }
  report["correlation"] = to_json(r, l.gt.categories);
  emit(dump_report(report), in.out, out);
  return 0;
}

int cmd_bounds(Inputs& in, const std::string& level_name,
               const std::string& direction, std::ostream& out,
               std::ostream& err) {
  const CorrelationLevel level = parse_level(level_name);
  const Loaded l = load_inputs(in, level == CorrelationLevel::kImage);
  BoundConfig cfg;
  cfg.direction = parse_direction(direction);
  cfg.pipeline = in.pipeline;
  cfg.tp_iou_thr = in.tp_iou;
  cfg.iou_floor = in.iou_floor;
  cfg.assigner = parse_assigner(in.assigner);
  cfg.threads = in.threads;

  const BoundReport r = level == CorrelationLevel::kImage
                            ? image_bound_report(*l.raw, l.gt.gts, cfg)
                            : class_bound_report(*l.finals, l.gt.gts, cfg);
  json report = base_report("bounds", l, in);
  report.update(to_json(r, l.gt.categories));
  report["ap50_unchanged"] = r.before.ap.at(0.5) == r.after.ap.at(0.5);
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  emit(dump_report(report), in.out, out);
  return 0;
}

// Uniform draws from a fixed algorithm so runs repeat across platforms.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  double operator()(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Block structure of the soft ranks used by the Spearman loss is unchanged
// under every +-h coordinate perturbation.
bool away_from_kinks(const std::vector<double>& scores, double epsilon,
                     double h) {
  const double eps = epsilon / static_cast<double>(scores.size());
  const auto base = soft_rank(scores, eps);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (const double step : {h, -h}) {
      auto moved = scores;
      moved[i] += step;
      const auto r = soft_rank(moved, eps);
      if (r.blocks != base.blocks || r.order != base.order) return false;
    }
  }
  return true;
}

int cmd_gradcheck(const LossArgs& a, std::ostream& out) {
  LossConfig cfg;
  cfg.coefficient = parse_coefficient(a.coef);
  cfg.epsilon = a.epsilon;
  cfg.lambda_corr = a.lambda;
  cfg.validate();
  if (a.n < 1 || a.trials < 1) throw UsageError("--n and --trials must be >= 1");

  const bool spearman_coef = cfg.coefficient == Coefficient::kSpearman;
  const double tol = spearman_coef ? 1e-4 : 1e-6;
  const double h = 1e-5;
  Draw draw(a.seed);

  out << "coef=" << a.coef << " n=" << a.n << " trials=" << a.trials
      << " tol=" << tol << "\n";
  out << "trial  status   rel_err\n";
  int failures = 0;
  for (int t = 0; t < a.trials; ++t) {
    std::vector<double> ious(a.n), scores(a.n);
    for (int attempt = 0;; ++attempt) {
      for (auto& v : ious) v = draw(0.3, 1.0);
      for (auto& v : scores) v = draw(0.0, 1.0);
      if (!spearman_coef || a.n < 2 || away_from_kinks(scores, a.epsilon, h) ||
          attempt >= 100) {
        break;
      }
    }
    const LossResult r = correlation_loss(ious, scores, cfg);
    std::ostringstream line;
    line << std::setw(5) << t << "  ";
    if (r.degenerate) {
      line << "skipped  degenerate";
      out << line.str() << "\n";
      continue;
    }
    std::vector<double> fd(a.n);
    for (int i = 0; i < a.n; ++i) {
      auto up = scores;
      auto down = scores;
      up[i] += h;
      down[i] -= h;
      fd[i] = (correlation_loss(ious, up, cfg).value -
               correlation_loss(ious, down, cfg).value) /
              (2.0 * h);
    }
    std::vector<double> diff(a.n);
    for (int i = 0; i < a.n; ++i) diff[i] = r.grad_scores[i] - fd[i];
    // Both zero up to rounding, as for Pearson on two points.
    const double scale = std::max(norm2(r.grad_scores), norm2(fd));
    const double rel = scale < 1e-9 ? 0.0 : norm2(diff) / scale;
    const bool ok = rel < tol;
    if (!ok) ++failures;
    line << (ok ? "pass     " : "FAIL     ") << std::scientific
         << std::setprecision(3) << rel;
    out << line.str() << "\n";
  }
  out << (failures == 0 ? "all checks passed" : "gradient check failed")
      << " (" << failures << " failures)\n";
  return failures == 0 ? 0 : 1;
}

int cmd_descend(const LossArgs& a, std::ostream& out) {
  LossConfig cfg;
  cfg.coefficient = parse_coefficient(a.coef);
  cfg.epsilon = a.epsilon;
  cfg.validate();
  if (a.n < 2) throw UsageError("--n must be >= 2");
  Draw draw(a.seed);
  std::vector<double> ious(a.n), scores(a.n);
  for (auto& v : ious) v = draw(0.5, 1.0);
  for (auto& v : scores) v = draw(0.0, 1.0);
  const auto trace = descend_demo(scores, ious, cfg, a.steps, a.lr);

  std::ostringstream csv;
  csv.precision(17);
  csv << "step,loss,spearman\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    csv << k << ',' << trace[k].loss << ',' << trace[k].spearman << '\n';
  }
  emit(csv.str(), a.out, out);
  return 0;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.out.empty()) throw UsageError("--out directory is required");
  const Dataset ds = synth(a.seed, a.images, a.classes, a.params);
  const std::filesystem::path dir(a.out);
  std::filesystem::create_directories(dir);
  write_text(dir / "gt.json", emit_gt(ds));
  write_text(dir / "raw_dets.json", emit_raw_dets(*ds.raw_dets, ds));
  write_text(dir / "final_dets.json", emit_final_dets(*ds.final_dets, ds));
  json report{{"command", "synth"},
              {"seed", a.seed},
              {"images", a.images},
              {"classes", a.classes},
              {"correlation", a.params.correlation},
              {"jitter", a.params.jitter},
              {"gts", ds.gts.size()},
              {"files", {"gt.json", "raw_dets.json", "final_dets.json"}}};
  out << dump_report(report);
  return 0;
}

void add_input_options(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--gt", in.gt, "COCO-style ground truth JSON");
  cmd->add_option("--dets", in.dets, "COCO results JSON (final detections)");
  cmd->add_option("--raw-dets", in.raw_dets,
                  "raw detections JSON, run through the post-processing");
  cmd->add_option("--score-thr", in.pipeline.score_thr, "score filter");
  cmd->add_option("--nms-iou", in.pipeline.nms_iou, "NMS IoU threshold");
  cmd->add_option("--top-k", in.pipeline.top_k, "detections kept per image");
  cmd->add_flag("--nms-free", in.nms_free, "skip NMS in the pipeline");
  cmd->add_option("--tp-iou", in.tp_iou, "IoU validating true positives");
  cmd->add_option("--iou-floor", in.iou_floor, "IoU floor for positives");
  cmd->add_option("--assigner", in.assigner, "max-iou or greedy");
  cmd->add_option("--threads", in.threads, "worker threads");
  cmd->add_option("--out", in.out, "write the report here");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Correlation-aware detection evaluation and loss toolkit",
               "corrdet"};
  app.require_subcommand(1);

  Inputs in;
  in.threads = default_threads();
  LossArgs loss;
  SynthArgs syn;
  std::string level = "class";
  std::string direction = "+1";
  std::string pr_csv;

  auto* eval = app.add_subcommand("eval", "COCO-style AP of detections");
  add_input_options(eval, in);
  eval->add_option("--pr-csv", pr_csv, "also write PR curves as CSV");

  auto* corr = app.add_subcommand("corr", "image- or class-level correlation");
  add_input_options(corr, in);
  corr->add_option("--level", level, "image or class");

  auto* bounds = app.add_subcommand("bounds", "AP under re-ranked scores");
  add_input_options(bounds, in);
  bounds->add_option("--level", level, "image or class");
  bounds->add_option("--direction", direction, "+1 or -1");

  auto* grad = app.add_subcommand("gradcheck",
                                  "loss gradients vs finite differences");
  auto* desc = app.add_subcommand("descend", "gradient descent demo trace");
  for (auto* cmd : {grad, desc}) {
    cmd->add_option("--coef", loss.coef, "spearman, concordance or pearson");
    cmd->add_option("--epsilon", loss.epsilon, "soft-rank regularization");
    cmd->add_option("--lambda", loss.lambda, "loss weight");
    cmd->add_option("--n", loss.n, "number of positives");
    cmd->add_option("--seed", loss.seed, "random seed");
  }
  grad->add_option("--trials", loss.trials, "random instances");
  desc->add_option("--steps", loss.steps, "descent steps");
  desc->add_option("--lr", loss.lr, "learning rate");
  desc->add_option("--out", loss.out, "write the CSV trace here");

  auto* syn_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  syn_cmd->add_option("--seed", syn.seed, "random seed");
  syn_cmd->add_option("--images", syn.images, "number of images");
  syn_cmd->add_option("--classes", syn.classes, "number of classes");
  syn_cmd->add_option("--knob", syn.params.correlation,
                      "score/IoU rank agreement in [-1, 1]");
  syn_cmd->add_option("--jitter", syn.params.jitter, "box jitter in [0, 0.3]");
  syn_cmd->add_option("--dups", syn.params.dups_per_gt,
                      "raw detections per object");
  syn_cmd->add_option("--fps", syn.params.fps_per_image,
                      "background false positives per image");
  syn_cmd->add_option("--max-gts", syn.params.max_gts_per_image,
                      "objects per image, at most");
  syn_cmd->add_option("--out", syn.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*eval) return cmd_eval(in, pr_csv, out);
    if (*corr) return cmd_corr(in, level, out);
    if (*bounds) return cmd_bounds(in, level, direction, out, err);
    if (*grad) return cmd_gradcheck(loss, out);
    if (*desc) return cmd_descend(loss, out);
    if (*syn_cmd) return cmd_synth(syn, out);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << error_kind(e) << ": " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace corrdet::cli
