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

#include "corrdet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace corrdet {

bool Box::valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && x2 > x1 && y2 > y1;
}

double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<double> MatchSet::ious() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.iou);
  return out;
}

std::vector<double> MatchSet::scores() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.score);
  return out;
}

IouMatrix iou_matrix(std::span<const Box> dets, std::span<const Box> gts) {
  IouMatrix m(dets.size(), std::vector<double>(gts.size(), 0.0));
  for (std::size_t i = 0; i < dets.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) m[i][j] = iou(dets[i], gts[j]);
  }
  return m;
}

std::vector<std::pair<int, int>> greedy_one_to_one(const IouMatrix& ious,
                                                   double iou_floor) {
  struct Cand {
    double iou;
    int det;
    int gt;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < ious.size(); ++i) {
    for (std::size_t j = 0; j < ious[i].size(); ++j) {
      if (ious[i][j] >= iou_floor) {
        cands.push_back({ious[i][j], static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    return std::tie(a.det, a.gt) < std::tie(b.det, b.gt);
  });

  std::vector<bool> det_used(ious.size(), false);
  std::vector<bool> gt_used(ious.empty() ? 0 : ious.front().size(), false);
  std::vector<std::pair<int, int>> pairs;
  for (const auto& c : cands) {
    if (det_used[c.det] || gt_used[c.gt]) continue;
    det_used[c.det] = true;
    gt_used[c.gt] = true;
    pairs.emplace_back(c.det, c.gt);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<std::pair<int, int>> max_iou_assign(const IouMatrix& ious,
                                                double iou_floor) {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < ious.size(); ++i) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t j = 0; j < ious[i].size(); ++j) {
      if (ious[i][j] >= iou_floor && (best < 0 || ious[i][j] > best_iou)) {
        best = static_cast<int>(j);
        best_iou = ious[i][j];
      }
    }
    if (best >= 0) pairs.emplace_back(static_cast<int>(i), best);
  }
  return pairs;
}

MatchSet match_positives(std::span<const RawDetection> dets,
                         std::span<const GtObject> gts, double iou_floor,
                         PositiveAssigner assigner) {
  IouMatrix m(dets.size(), std::vector<double>(gts.size(), 0.0));
  for (std::size_t i = 0; i < dets.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      m[i][j] = iou(dets[i].box, gts[j].box);
    }
  }
  const auto pairs = assigner == PositiveAssigner::kMaxIou
                         ? max_iou_assign(m, iou_floor)
                         : greedy_one_to_one(m, iou_floor);
  MatchSet out;
  out.entries.reserve(pairs.size());
  for (const auto& [d, g] : pairs) {
    const auto& scores = dets[d].class_scores;
    const auto cls = static_cast<std::size_t>(gts[g].class_id);
    const double s = cls < scores.size() ? scores[cls] : 0.0;
    out.entries.push_back({d, g, m[d][g], s});
  }
  return out;
}

TpAssignment assign_tp(std::span<const FinalDetection> dets,
                       std::span<const GtObject> gts, double iou_thr) {
  TpAssignment out;
  const std::size_t n = dets.size();
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](int a, int b) { return dets[a].score > dets[b].score; });
  out.gt_of_det.assign(n, -1);
  out.iou_of_det.assign(n, 0.0);

  std::map<std::pair<int, int>, std::vector<int>> gts_by_key;
  for (std::size_t j = 0; j < gts.size(); ++j) {
    gts_by_key[{gts[j].image_id, gts[j].class_id}].push_back(
        static_cast<int>(j));
  }
  std::vector<bool> gt_used(gts.size(), false);

  for (const int d : out.order) {
    const auto it = gts_by_key.find({dets[d].image_id, dets[d].class_id});
    if (it == gts_by_key.end()) continue;
    int best = -1;
    double best_iou = 0.0;
    for (const int g : it->second) {
      if (gt_used[g]) continue;
      const double v = iou(dets[d].box, gts[g].box);
      if (v >= iou_thr && (best < 0 || v > best_iou)) {
        best = g;
        best_iou = v;
      }
    }
    if (best >= 0) {
      gt_used[best] = true;
      out.gt_of_det[d] = best;
      out.iou_of_det[d] = best_iou;
    }
  }
  return out;
}

MatchSet match_tp(std::span<const FinalDetection> dets,
                  std::span<const GtObject> gts, double iou_thr) {
  const auto a = assign_tp(dets, gts, iou_thr);
  MatchSet out;
  for (const int d : a.order) {
    if (a.gt_of_det[d] < 0) continue;
    out.entries.push_back({d, a.gt_of_det[d], a.iou_of_det[d], dets[d].score});
  }
  return out;
}

}  // namespace corrdet
