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

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corrdet/detection.hpp"
#include "corrdet/geometry.hpp"
#include "corrdet/metrics.hpp"
#include "corrdet/pipeline.hpp"

namespace corrdet {

// +1 orders scores with IoUs (upper bound), -1 against them (lower bound).
enum class RerankDirection { kPositive = 1, kNegative = -1 };

std::string_view to_string(RerankDirection d);
// Accepts "+1", "1", "-1". Throws std::invalid_argument.
RerankDirection parse_direction(std::string_view s);

enum class CorrelationLevel { kImage, kClass };

std::string_view to_string(CorrelationLevel l);
// Accepts "image", "class". Throws std::invalid_argument.
CorrelationLevel parse_level(std::string_view s);

// Permutes the scores of matched entries so their order follows IoU order
// (+1) or reversed IoU order (-1). Returns the new score of each entry. IoU
// ties break by lower detection index.
std::vector<double> rerank_scores(const MatchSet& matches,
                                  RerankDirection dir);

// Reassigns the GT-class scores of the positives in `matches` (from
// match_positives on these dets and gts). Boxes, negatives and non-GT class
// scores are copied bit-for-bit.
std::vector<RawDetection> rerank_image_level(std::span<const RawDetection> dets,
                                             std::span<const GtObject> gts,
                                             const MatchSet& matches,
                                             RerankDirection dir);

// Permutes scores among the true positives in `matches` (from match_tp on
// these dets). False positives and boxes are untouched.
std::vector<FinalDetection> rerank_class_level(
    std::span<const FinalDetection> dets, const MatchSet& matches,
    RerankDirection dir);

// Class-level rerank of a whole multi-class detection set, matching each
// class at `tp_iou_thr`. Output keeps the input order.
std::vector<FinalDetection> rerank_dataset_class_level(
    std::span<const FinalDetection> dets, std::span<const GtObject> gts,
    double tp_iou_thr, RerankDirection dir);

// Image-level rerank of every image's raw detections.
std::map<int, std::vector<RawDetection>> rerank_dataset_image_level(
    const std::map<int, std::vector<RawDetection>>& raw,
    std::span<const GtObject> gts, double iou_floor, PositiveAssigner assigner,
    RerankDirection dir);

struct BoundConfig {
  RerankDirection direction = RerankDirection::kPositive;
  PipelineConfig pipeline;
  double tp_iou_thr = 0.5;
  double iou_floor = 0.5;
  PositiveAssigner assigner = PositiveAssigner::kMaxIou;
  int threads = 1;
};

struct EvalSnapshot {
  ApResult ap;
  CorrelationReport correlation;
};

struct BoundReport {
  CorrelationLevel level = CorrelationLevel::kClass;
  RerankDirection direction = RerankDirection::kPositive;
  EvalSnapshot before;
  EvalSnapshot after;
  std::vector<std::string> warnings;
};

// AP and class-level correlation before and after a class-level rerank of
// post-processed detections. AP errors propagate from coco_ap.
BoundReport class_bound_report(std::span<const FinalDetection> dets,
                               std::span<const GtObject> gts,
                               const BoundConfig& cfg);

// AP (after the post-processing pipeline) and image-level correlation before
// and after an image-level rerank of raw detections.
BoundReport image_bound_report(
    const std::map<int, std::vector<RawDetection>>& raw,
    std::span<const GtObject> gts, const BoundConfig& cfg);

}  // namespace corrdet
