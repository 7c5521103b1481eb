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

#include <span>
#include <utility>
#include <vector>

#include "corrdet/detection.hpp"

namespace corrdet {

double iou(const Box& a, const Box& b);

struct MatchEntry {
  int det = 0;
  int gt = 0;
  double iou = 0.0;
  // Score of the ground truth's class for this detection.
  double score = 0.0;

  friend bool operator==(const MatchEntry&, const MatchEntry&) = default;
};

struct MatchSet {
  std::vector<MatchEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  std::vector<double> ious() const;
  std::vector<double> scores() const;
};

// How training-style positives are assigned to ground truths.
enum class PositiveAssigner {
  // Each detection goes to its highest-IoU ground truth when that IoU clears
  // the floor. Several detections may share one ground truth, as with the
  // max-IoU assigners detectors train with.
  kMaxIou,
  // Greedy one-to-one: repeatedly take the unmatched pair with highest IoU.
  kGreedyOneToOne,
};

using IouMatrix = std::vector<std::vector<double>>;

IouMatrix iou_matrix(std::span<const Box> dets, std::span<const Box> gts);

// Pairs (det, gt) chosen from an IoU matrix, ordered by detection index.
// IoU ties break by lower detection index, then lower gt index.
std::vector<std::pair<int, int>> greedy_one_to_one(const IouMatrix& ious,
                                                   double iou_floor);
std::vector<std::pair<int, int>> max_iou_assign(const IouMatrix& ious,
                                                double iou_floor);

// Positives of one image. Entry scores are taken from each detection's
// score vector at the matched ground truth's class.
MatchSet match_positives(std::span<const RawDetection> dets,
                         std::span<const GtObject> gts, double iou_floor = 0.5,
                         PositiveAssigner assigner = PositiveAssigner::kMaxIou);

// Outcome of evaluation-style matching, indexed by input detection.
struct TpAssignment {
  // Detection indices by descending score; ties keep lower index first.
  std::vector<int> order;
  // Matched gt index per detection, -1 for false positives.
  std::vector<int> gt_of_det;
  std::vector<double> iou_of_det;
};

// COCO-style matching for detections of a single class. A detection can only
// match a ground truth with the same class and image id.
TpAssignment assign_tp(std::span<const FinalDetection> dets,
                       std::span<const GtObject> gts, double iou_thr);

// True positives of assign_tp, in descending score order.
MatchSet match_tp(std::span<const FinalDetection> dets,
                  std::span<const GtObject> gts, double iou_thr);

}  // namespace corrdet
