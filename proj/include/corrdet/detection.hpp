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

#include <vector>

namespace corrdet {

// Axis-aligned box in corner form, pixel units.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }

  // Finite coordinates and strictly positive extent.
  bool valid() const;

  static Box from_xywh(double x, double y, double w, double h) {
    return Box{x, y, x + w, y + h};
  }

  friend bool operator==(const Box&, const Box&) = default;
};

struct GtObject {
  Box box;
  int class_id = 0;
  int image_id = 0;

  friend bool operator==(const GtObject&, const GtObject&) = default;
};

// A detection before post-processing: one box, one score per class.
struct RawDetection {
  Box box;
  std::vector<double> class_scores;

  friend bool operator==(const RawDetection&, const RawDetection&) = default;
};

// A detection after post-processing.
struct FinalDetection {
  Box box;
  int class_id = 0;
  double score = 0.0;
  int image_id = 0;

  friend bool operator==(const FinalDetection&,
                         const FinalDetection&) = default;
};

}  // namespace corrdet
