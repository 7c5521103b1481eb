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

#include "corrdet/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "corrdet/geometry.hpp"
#include "corrdet/parallel.hpp"

namespace corrdet {
namespace {

// Indices into `dets` that survive greedy NMS, in descending score order.
std::vector<int> nms_indices(std::span<const FinalDetection> dets,
                             std::span<const int> candidates, double iou_thr) {
  std::vector<int> order(candidates.begin(), candidates.end());
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return dets[a].score > dets[b].score;
  });
  std::vector<int> kept;
  std::vector<bool> suppressed(order.size(), false);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (suppressed[i]) continue;
    kept.push_back(order[i]);
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (!suppressed[j] &&
          iou(dets[order[i]].box, dets[order[j]].box) > iou_thr) {
        suppressed[j] = true;
      }
    }
  }
  return kept;
}

}  // namespace

void PipelineConfig::validate() const {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(score_thr)) throw std::invalid_argument("score_thr not in [0,1]");
  if (!in_unit(nms_iou)) throw std::invalid_argument("nms_iou not in [0,1]");
  if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
}

std::vector<FinalDetection> nms(std::span<const FinalDetection> dets,
                                double iou_thr) {
  std::vector<int> all(dets.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<FinalDetection> out;
  for (const int i : nms_indices(dets, all, iou_thr)) out.push_back(dets[i]);
  return out;
}

std::vector<FinalDetection> postprocess(std::span<const RawDetection> dets,
                                        const PipelineConfig& cfg,
                                        int image_id) {
  std::vector<FinalDetection> cands;
  for (const auto& d : dets) {
    for (std::size_t c = 0; c < d.class_scores.size(); ++c) {
      if (d.class_scores[c] > cfg.score_thr) {
        cands.push_back({d.box, static_cast<int>(c), d.class_scores[c],
                         image_id});
      }
    }
  }

  std::vector<int> kept;
  if (cfg.nms_enabled) {
    std::map<int, std::vector<int>> by_class;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      by_class[cands[i].class_id].push_back(static_cast<int>(i));
    }
    for (const auto& [cls, idx] : by_class) {
      const auto survivors = nms_indices(cands, idx, cfg.nms_iou);
      kept.insert(kept.end(), survivors.begin(), survivors.end());
    }
    std::sort(kept.begin(), kept.end());
  } else {
    kept.resize(cands.size());
    std::iota(kept.begin(), kept.end(), 0);
  }

  std::stable_sort(kept.begin(), kept.end(), [&](int a, int b) {
    return cands[a].score > cands[b].score;
  });
  if (kept.size() > static_cast<std::size_t>(cfg.top_k)) {
    kept.resize(static_cast<std::size_t>(cfg.top_k));
  }
  std::vector<FinalDetection> out;
  out.reserve(kept.size());
  for (const int i : kept) out.push_back(cands[i]);
  return out;
}

std::vector<FinalDetection> postprocess_all(
    const std::map<int, std::vector<RawDetection>>& raw,
    const PipelineConfig& cfg, int threads) {
  std::vector<const std::pair<const int, std::vector<RawDetection>>*> items;
  for (const auto& kv : raw) items.push_back(&kv);
  const auto per_image = parallel_map(items.size(), threads, [&](std::size_t i) {
    return postprocess(items[i]->second, cfg, items[i]->first);
  });
  std::vector<FinalDetection> out;
  for (const auto& v : per_image) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace corrdet
