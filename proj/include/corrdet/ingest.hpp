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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrdet/detection.hpp"

namespace corrdet {

struct Category {
  int id = 0;  // id as written in the file
  std::string name;

  friend bool operator==(const Category&, const Category&) = default;
};

struct ImageInfo {
  int id = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageInfo&, const ImageInfo&) = default;
};

using RawDetectionsByImage = std::map<int, std::vector<RawDetection>>;

// Ground truth plus optional detections. Class ids inside GtObject and
// FinalDetection are indices into `categories`, not file category ids.
struct Dataset {
  std::vector<Category> categories;
  std::vector<ImageInfo> images;
  std::vector<GtObject> gts;
  std::optional<RawDetectionsByImage> raw_dets;
  std::optional<std::vector<FinalDetection>> final_dets;

  int num_classes() const { return static_cast<int>(categories.size()); }
  // Index of a file category id; throws ReferenceError when unknown.
  int class_index(int category_id) const;
  const ImageInfo* find_image(int image_id) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// COCO annotation subset: `images` (id, width, height), `annotations` (id,
// image_id, category_id, bbox [x, y, w, h], optional iscrowd == 0) and
// `categories` (id, name). Boxes become corner form, clipped to the image.
//
// Errors: ParseError (unreadable or malformed JSON), SchemaError (missing or
// ill-typed fields, degenerate boxes, crowd annotations), ReferenceError
// (dangling image or category ids).
Dataset parse_gt(std::string_view json_text);
Dataset load_gt(const std::filesystem::path& path);

// {"detections": [{image_id, bbox [x1, y1, x2, y2], scores [C reals]}]}.
// Scores are indexed like `gt.categories`. Adds DimensionError for a score
// vector of the wrong length.
RawDetectionsByImage parse_raw_dets(std::string_view json_text,
                                    const Dataset& gt);
RawDetectionsByImage load_raw_dets(const std::filesystem::path& path,
                                   const Dataset& gt);

// COCO results list: [{image_id, category_id, bbox [x, y, w, h], score}].
std::vector<FinalDetection> parse_final_dets(std::string_view json_text,
                                             const Dataset& gt);
std::vector<FinalDetection> load_final_dets(const std::filesystem::path& path,
                                            const Dataset& gt);

std::string emit_gt(const Dataset& ds);
std::string emit_raw_dets(const RawDetectionsByImage& raw, const Dataset& gt);
std::string emit_final_dets(const std::vector<FinalDetection>& dets,
                            const Dataset& gt);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

// Parameters of the synthetic generator.
struct SynthParams {
  // Target rank agreement in [-1, 1] between GT-class scores and IoUs, for
  // raw positives per image and final true positives per class.
  double correlation = 0.0;
  int max_gts_per_image = 4;
  int dups_per_gt = 3;
  int fps_per_image = 1;
  // Maximum relative shift and rescale applied to a ground-truth box.
  double jitter = 0.15;
  int width = 640;
  int height = 480;
};

// Deterministic synthetic dataset with ground truth, raw detections (a
// cluster of jittered duplicates around every object plus background false
// positives) and final detections (one jittered detection per object plus
// background false positives). Objects sit in separate cells of a 160 px
// grid, so a detection only ever overlaps its own object. Coordinates are
// multiples of 1/16 px. Throws std::invalid_argument on unusable params.
Dataset synth(std::uint64_t seed, int n_images, int n_classes,
              const SynthParams& params);

}  // namespace corrdet
