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

#include "corrdet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "corrdet/correlation.hpp"
#include "corrdet/errors.hpp"
#include "corrdet/parallel.hpp"

namespace corrdet {
namespace {

constexpr int kRecallPoints = 101;

struct ClassSplit {
  std::map<int, std::vector<FinalDetection>> dets;
  std::map<int, std::vector<GtObject>> gts;
};

ClassSplit split_by_class(std::span<const FinalDetection> dets,
                          std::span<const GtObject> gts) {
  ClassSplit s;
  for (const auto& d : dets) s.dets[d.class_id].push_back(d);
  for (const auto& g : gts) s.gts[g.class_id].push_back(g);
  return s;
}

// Spearman of a match set, or nullopt when undefined.
std::optional<double> match_spearman(const MatchSet& m) {
  if (m.size() < 2) return std::nullopt;
  try {
    return spearman(m.ious(), m.scores());
  } catch (const DegenerateInput&) {
    return std::nullopt;
  }
}

double mean_of(const std::vector<std::pair<int, double>>& v) {
  double sum = 0.0;
  for (const auto& [id, beta] : v) sum += beta;
  return sum / static_cast<double>(v.size());
}

}  // namespace

std::vector<ImageSample> group_images(
    const std::map<int, std::vector<RawDetection>>& raw,
    std::span<const GtObject> gts) {
  std::map<int, ImageSample> samples;
  for (const auto& [id, dets] : raw) samples[id] = {id, dets, {}};
  for (const auto& g : gts) {
    auto& s = samples[g.image_id];
    s.image_id = g.image_id;
    s.gts.push_back(g);
  }
  std::vector<ImageSample> out;
  out.reserve(samples.size());
  for (auto& [id, s] : samples) out.push_back(std::move(s));
  return out;
}

CorrelationReport beta_img(std::span<const ImageSample> images,
                           const BetaImgOptions& opts) {
  const auto betas =
      parallel_map(images.size(), opts.threads, [&](std::size_t i) {
        const auto m = match_positives(images[i].dets, images[i].gts,
                                       opts.iou_floor, opts.assigner);
        return match_spearman(m);
      });
  CorrelationReport r;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (betas[i]) {
      r.per_image.emplace_back(images[i].image_id, *betas[i]);
    } else {
      ++r.skipped_images;
    }
  }
  if (r.per_image.empty()) {
    throw EmptyEvaluation("beta_img: no image has two or more positives");
  }
  r.beta_img = mean_of(r.per_image);
  return r;
}

CorrelationReport beta_cls(std::span<const FinalDetection> dets,
                           std::span<const GtObject> gts, double tp_iou_thr) {
  const ClassSplit split = split_by_class(dets, gts);
  CorrelationReport r;
  for (const auto& [cls, class_gts] : split.gts) {
    const auto it = split.dets.find(cls);
    if (it == split.dets.end()) {
      ++r.skipped_classes;
      continue;
    }
    const auto beta = match_spearman(match_tp(it->second, class_gts, tp_iou_thr));
    if (beta) {
      r.per_class.emplace_back(cls, *beta);
    } else {
      ++r.skipped_classes;
    }
  }
  if (r.per_class.empty()) {
    throw EmptyEvaluation("beta_cls: no class has two or more true positives");
  }
  r.beta_cls = mean_of(r.per_class);
  return r;
}

std::vector<PrPoint> pr_curve(std::span<const FinalDetection> dets,
                              std::span<const GtObject> gts, double iou_thr) {
  if (gts.empty()) throw NoGroundTruth("pr_curve: no ground truth");
  const auto a = assign_tp(dets, gts, iou_thr);
  const double n_gt = static_cast<double>(gts.size());
  std::vector<PrPoint> curve;
  curve.reserve(dets.size());
  int tp = 0;
  int k = 0;
  for (const int d : a.order) {
    ++k;
    if (a.gt_of_det[d] >= 0) ++tp;
    curve.push_back({tp / n_gt, static_cast<double>(tp) / k});
  }
  return curve;
}

double average_precision(std::span<const PrPoint> curve) {
  if (curve.empty()) return 0.0;
  // Precision envelope from the right: best precision at or after each point.
  std::vector<double> envelope(curve.size());
  double best = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    best = std::max(best, curve[i].precision);
    envelope[i] = best;
  }
  double sum = 0.0;
  std::size_t pos = 0;
  for (int k = 0; k < kRecallPoints; ++k) {
    const double r = k / 100.0;
    // Recall is non-decreasing along the curve.
    while (pos < curve.size() && curve[pos].recall < r) ++pos;
    if (pos < curve.size()) sum += envelope[pos];
  }
  return sum / kRecallPoints;
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int k = 0; k < 10; ++k) t.push_back((50 + 5 * k) / 100.0);
  return t;
}

double ApResult::at(double iou_thr) const {
  for (const auto& [t, ap] : per_threshold) {
    if (t == iou_thr) return ap;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

ApResult coco_ap(std::span<const FinalDetection> dets,
                 std::span<const GtObject> gts,
                 std::span<const double> thresholds) {
  const std::vector<double> thr = thresholds.empty()
                                      ? coco_iou_thresholds()
                                      : std::vector<double>(thresholds.begin(),
                                                            thresholds.end());
  const ClassSplit split = split_by_class(dets, gts);
  if (split.gts.empty()) {
    throw EmptyEvaluation("coco_ap: no class has ground truth");
  }
  ApResult r;
  const std::vector<FinalDetection> none;
  for (const auto& [cls, class_gts] : split.gts) {
    const auto it = split.dets.find(cls);
    const auto& class_dets = it == split.dets.end() ? none : it->second;
    std::vector<double> row;
    row.reserve(thr.size());
    for (const double t : thr) {
      const auto curve = pr_curve(class_dets, class_gts, t);
      row.push_back(average_precision(curve));
    }
    r.class_ids.push_back(cls);
    r.per_class.push_back(std::move(row));
  }
  const double n_cls = static_cast<double>(r.class_ids.size());
  double total = 0.0;
  for (std::size_t t = 0; t < thr.size(); ++t) {
    double sum = 0.0;
    for (const auto& row : r.per_class) sum += row[t];
    r.per_threshold.emplace_back(thr[t], sum / n_cls);
    total += sum / n_cls;
  }
  r.ap_c = total / static_cast<double>(thr.size());
  return r;
}

}  // namespace corrdet
