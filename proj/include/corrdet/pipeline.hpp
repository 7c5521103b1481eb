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
#include <span>
#include <vector>

#include "corrdet/detection.hpp"

namespace corrdet {

struct PipelineConfig {
  // Candidates must score strictly above this.
  double score_thr = 0.05;
  // Suppress when IoU with a kept detection is strictly above this.
  double nms_iou = 0.6;
  int top_k = 100;
  bool nms_enabled = true;

  // Throws std::invalid_argument when a threshold leaves [0, 1] or top_k < 1.
  void validate() const;
};

// Greedy hard NMS over detections of one class. Survivors come back in
// descending score order; ties keep the lower input index first.
std::vector<FinalDetection> nms(std::span<const FinalDetection> dets,
                                double iou_thr);

// Score filter, class-wise NMS (unless disabled) and top-k for one image.
// Output is sorted by descending score and stamped with `image_id`.
std::vector<FinalDetection> postprocess(std::span<const RawDetection> dets,
                                        const PipelineConfig& cfg,
                                        int image_id = 0);

// postprocess over every image, in image id order. With threads > 1 the
// images are split across workers; the result does not depend on `threads`.
std::vector<FinalDetection> postprocess_all(
    const std::map<int, std::vector<RawDetection>>& raw,
    const PipelineConfig& cfg, int threads = 1);

}  // namespace corrdet
