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

#include "corrdet/bounds.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "corrdet/errors.hpp"

namespace corrdet {
namespace {

std::map<int, std::vector<GtObject>> gts_by_image(
    std::span<const GtObject> gts) {
  std::map<int, std::vector<GtObject>> out;
  for (const auto& g : gts) out[g.image_id].push_back(g);
  return out;
}

void try_beta_cls(std::span<const FinalDetection> dets,
                  std::span<const GtObject> gts, double thr,
                  EvalSnapshot& snap, std::vector<std::string>& warnings,
                  const char* stage) {
  try {
    snap.correlation = beta_cls(dets, gts, thr);
  } catch (const EmptyEvaluation& e) {
    warnings.push_back(std::string(stage) + ": " + e.what());
  }
}

void try_beta_img(std::span<const ImageSample> samples,
                  const BetaImgOptions& opts, EvalSnapshot& snap,
                  std::vector<std::string>& warnings, const char* stage) {
  try {
    snap.correlation = beta_img(samples, opts);
  } catch (const EmptyEvaluation& e) {
    warnings.push_back(std::string(stage) + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(RerankDirection d) {
  return d == RerankDirection::kPositive ? "+1" : "-1";
}

RerankDirection parse_direction(std::string_view s) {
  if (s == "+1" || s == "1") return RerankDirection::kPositive;
  if (s == "-1") return RerankDirection::kNegative;
  throw std::invalid_argument("direction must be +1 or -1, got " +
                              std::string(s));
}

std::string_view to_string(CorrelationLevel l) {
  return l == CorrelationLevel::kImage ? "image" : "class";
}

CorrelationLevel parse_level(std::string_view s) {
  if (s == "image") return CorrelationLevel::kImage;
  if (s == "class") return CorrelationLevel::kClass;
  throw std::invalid_argument("level must be image or class, got " +
                              std::string(s));
}

std::vector<double> rerank_scores(const MatchSet& matches,
                                  RerankDirection dir) {
  const auto& e = matches.entries;
  const std::size_t n = e.size();
  std::vector<std::size_t> by_iou(n);
  std::iota(by_iou.begin(), by_iou.end(), 0);
  std::sort(by_iou.begin(), by_iou.end(), [&](std::size_t a, std::size_t b) {
    if (e[a].iou != e[b].iou) return e[a].iou < e[b].iou;
    return e[a].det < e[b].det;
  });
  std::vector<double> pool = matches.scores();
  std::sort(pool.begin(), pool.end());

  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[by_iou[k]] =
        dir == RerankDirection::kPositive ? pool[k] : pool[n - 1 - k];
  }
  return out;
}

std::vector<RawDetection> rerank_image_level(std::span<const RawDetection> dets,
                                             std::span<const GtObject> gts,
                                             const MatchSet& matches,
                                             RerankDirection dir) {
  std::vector<RawDetection> out(dets.begin(), dets.end());
  const auto scores = rerank_scores(matches, dir);
  for (std::size_t k = 0; k < matches.size(); ++k) {
    const auto& m = matches.entries[k];
    out[m.det].class_scores[gts[m.gt].class_id] = scores[k];
  }
  return out;
}

std::vector<FinalDetection> rerank_class_level(
    std::span<const FinalDetection> dets, const MatchSet& matches,
    RerankDirection dir) {
  std::vector<FinalDetection> out(dets.begin(), dets.end());
  const auto scores = rerank_scores(matches, dir);
  for (std::size_t k = 0; k < matches.size(); ++k) {
    out[matches.entries[k].det].score = scores[k];
  }
  return out;
}

std::vector<FinalDetection> rerank_dataset_class_level(
    std::span<const FinalDetection> dets, std::span<const GtObject> gts,
    double tp_iou_thr, RerankDirection dir) {
  std::map<int, std::vector<int>> det_idx;
  std::map<int, std::vector<GtObject>> class_gts;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    det_idx[dets[i].class_id].push_back(static_cast<int>(i));
  }
  for (const auto& g : gts) class_gts[g.class_id].push_back(g);

  std::vector<FinalDetection> out(dets.begin(), dets.end());
  for (const auto& [cls, idx] : det_idx) {
    const auto it = class_gts.find(cls);
    if (it == class_gts.end()) continue;
    std::vector<FinalDetection> subset;
    subset.reserve(idx.size());
    for (const int i : idx) subset.push_back(dets[i]);
    const auto matches = match_tp(subset, it->second, tp_iou_thr);
    const auto reranked = rerank_class_level(subset, matches, dir);
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = reranked[k];
  }
  return out;
}

std::map<int, std::vector<RawDetection>> rerank_dataset_image_level(
    const std::map<int, std::vector<RawDetection>>& raw,
    std::span<const GtObject> gts, double iou_floor, PositiveAssigner assigner,
    RerankDirection dir) {
  const auto by_image = gts_by_image(gts);
  std::map<int, std::vector<RawDetection>> out;
  for (const auto& [id, dets] : raw) {
    const auto it = by_image.find(id);
    if (it == by_image.end()) {
      out[id] = dets;
      continue;
    }
    const auto matches = match_positives(dets, it->second, iou_floor, assigner);
    out[id] = rerank_image_level(dets, it->second, matches, dir);
  }
  return out;
}

BoundReport class_bound_report(std::span<const FinalDetection> dets,
                               std::span<const GtObject> gts,
                               const BoundConfig& cfg) {
  BoundReport r;
  r.level = CorrelationLevel::kClass;
  r.direction = cfg.direction;
  const auto reranked =
      rerank_dataset_class_level(dets, gts, cfg.tp_iou_thr, cfg.direction);
  r.before.ap = coco_ap(dets, gts);
  r.after.ap = coco_ap(reranked, gts);
  try_beta_cls(dets, gts, cfg.tp_iou_thr, r.before, r.warnings, "before");
  try_beta_cls(reranked, gts, cfg.tp_iou_thr, r.after, r.warnings, "after");
  return r;
}

BoundReport image_bound_report(
    const std::map<int, std::vector<RawDetection>>& raw,
    std::span<const GtObject> gts, const BoundConfig& cfg) {
  BoundReport r;
  r.level = CorrelationLevel::kImage;
  r.direction = cfg.direction;
  const auto reranked = rerank_dataset_image_level(
      raw, gts, cfg.iou_floor, cfg.assigner, cfg.direction);

  r.before.ap = coco_ap(postprocess_all(raw, cfg.pipeline, cfg.threads), gts);
  r.after.ap =
      coco_ap(postprocess_all(reranked, cfg.pipeline, cfg.threads), gts);

  const BetaImgOptions opts{cfg.iou_floor, cfg.assigner, cfg.threads};
  try_beta_img(group_images(raw, gts), opts, r.before, r.warnings, "before");
  try_beta_img(group_images(reranked, gts), opts, r.after, r.warnings,
               "after");
  return r;
}

}  // namespace corrdet
