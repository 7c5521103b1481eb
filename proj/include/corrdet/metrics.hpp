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
#include <utility>
#include <vector>

#include "corrdet/detection.hpp"
#include "corrdet/geometry.hpp"

namespace corrdet {

// Pre-post-processing detections of one image with its ground truth.
struct ImageSample {
  int image_id = 0;
  std::vector<RawDetection> dets;
  std::vector<GtObject> gts;
};

// One sample per image id present in either input, in id order.
std::vector<ImageSample> group_images(
    const std::map<int, std::vector<RawDetection>>& raw,
    std::span<const GtObject> gts);

struct CorrelationReport {
  std::optional<double> beta_img;
  std::optional<double> beta_cls;
  std::vector<std::pair<int, double>> per_image;
  std::vector<std::pair<int, double>> per_class;
  int skipped_images = 0;
  int skipped_classes = 0;
};

struct BetaImgOptions {
  double iou_floor = 0.5;
  PositiveAssigner assigner = PositiveAssigner::kMaxIou;
  int threads = 1;
};

// Image-level correlation: mean over images of the Spearman coefficient
// between positives' IoUs and GT-class scores. Images with fewer than two
// positives or a tied-out ranking are skipped and counted. Throws
// EmptyEvaluation when nothing remains.
CorrelationReport beta_img(std::span<const ImageSample> images,
                           const BetaImgOptions& opts = {});

// Class-level correlation: mean over classes with ground truth of the
// Spearman coefficient between true positives' IoUs and scores, with true
// positives matched dataset-wide at `tp_iou_thr`. Skip policy as beta_img.
CorrelationReport beta_cls(std::span<const FinalDetection> dets,
                           std::span<const GtObject> gts,
                           double tp_iou_thr = 0.5);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;

  friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

// One point per detection, walking in descending score order. Detections and
// ground truth must belong to a single class. Throws NoGroundTruth when `gts`
// is empty.
std::vector<PrPoint> pr_curve(std::span<const FinalDetection> dets,
                              std::span<const GtObject> gts, double iou_thr);

// 101-point interpolated AP: the mean over recall r in {0, 0.01, ..., 1} of
// the best precision at recall >= r (0 where no point reaches r).
double average_precision(std::span<const PrPoint> curve);

// {0.50, 0.55, ..., 0.95}.
std::vector<double> coco_iou_thresholds();

struct ApResult {
  double ap_c = 0.0;
  // (threshold, AP averaged over classes)
  std::vector<std::pair<double, double>> per_threshold;
  std::vector<int> class_ids;
  // per_class[c][t]: class class_ids[c] at thresholds[t].
  std::vector<std::vector<double>> per_class;

  // AP at a threshold (exact match), or NaN.
  double at(double iou_thr) const;
};

// COCO-style AP. Classes without ground truth are excluded; a class with
// ground truth but no detections scores 0. Throws EmptyEvaluation when no
// class has ground truth.
ApResult coco_ap(std::span<const FinalDetection> dets,
                 std::span<const GtObject> gts,
                 std::span<const double> thresholds = {});

}  // namespace corrdet
