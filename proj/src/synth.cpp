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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "corrdet/correlation.hpp"
#include "corrdet/geometry.hpp"
#include "corrdet/ingest.hpp"

namespace corrdet {
namespace {

constexpr int kCell = 160;
constexpr int kMargin = 16;
constexpr int kMinSide = 48;
constexpr int kMaxSide = 112;
constexpr double kQuantum = 16.0;  // coordinates are multiples of 1/16 px

// std::mt19937_64 output is fixed by the standard; the conversions below are
// ours, so datasets are identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform in [0, n).
  int below(int n) {
    return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(static_cast<int>(i)))]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

double quantize(double v) { return std::round(v * kQuantum) / kQuantum; }

Box box_in_cell(Rng& rng, int cell_x, int cell_y) {
  const int w = kMinSide + rng.below(kMaxSide - kMinSide + 1);
  const int h = kMinSide + rng.below(kMaxSide - kMinSide + 1);
  const int x = cell_x + kMargin + rng.below(kCell - 2 * kMargin - w + 1);
  const int y = cell_y + kMargin + rng.below(kCell - 2 * kMargin - h + 1);
  return Box{static_cast<double>(x), static_cast<double>(y),
             static_cast<double>(x + w), static_cast<double>(y + h)};
}

Box jitter_box(Rng& rng, const Box& b, double jitter, int width, int height) {
  const double w = b.width();
  const double h = b.height();
  const double cx = 0.5 * (b.x1 + b.x2) + rng.uniform(-jitter, jitter) * w;
  const double cy = 0.5 * (b.y1 + b.y2) + rng.uniform(-jitter, jitter) * h;
  const double nw = w * (1.0 + rng.uniform(-jitter, jitter));
  const double nh = h * (1.0 + rng.uniform(-jitter, jitter));
  Box out{quantize(cx - 0.5 * nw), quantize(cy - 0.5 * nh),
          quantize(cx + 0.5 * nw), quantize(cy + 0.5 * nh)};
  out.x1 = std::clamp(out.x1, 0.0, static_cast<double>(width));
  out.x2 = std::clamp(out.x2, 0.0, static_cast<double>(width));
  out.y1 = std::clamp(out.y1, 0.0, static_cast<double>(height));
  out.y2 = std::clamp(out.y2, 0.0, static_cast<double>(height));
  return out;
}

std::vector<double> noise_scores(Rng& rng, int n_classes) {
  std::vector<double> s(static_cast<std::size_t>(n_classes));
  for (double& v : s) v = rng.uniform(0.0, 0.1);
  return s;
}

// Scores for a group of matched detections: a random pool handed out in the
// order of k * z(IoU rank) + (1 - |k|) * noise, where z is the standardized
// IoU rank and the noise has unit variance. k = +1 reproduces the IoU order,
// k = -1 reverses it.
std::vector<double> knob_scores(Rng& rng, std::span<const double> ious,
                                double knob) {
  const std::size_t n = ious.size();
  std::vector<double> pool(n);
  for (double& s : pool) s = rng.uniform(0.05, 1.0);
  std::sort(pool.begin(), pool.end());
  if (n == 0) return pool;

  const auto ranks = fractional_ranks(ious);
  const double mean = 0.5 * static_cast<double>(n + 1);
  double var = 0.0;
  for (const double r : ranks) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));

  std::vector<double> key(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = sd > 0.0 ? (ranks[i] - mean) / sd : 0.0;
    const double e = rng.uniform(-std::sqrt(3.0), std::sqrt(3.0));
    key[i] = knob * z + (1.0 - std::abs(knob)) * e;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[order[k]] = pool[k];
  return out;
}

}  // namespace

Dataset synth(std::uint64_t seed, int n_images, int n_classes,
              const SynthParams& p) {
  const int cols = p.width / kCell;
  const int rows = p.height / kCell;
  if (n_images < 0 || n_classes < 1) {
    throw std::invalid_argument("synth: need n_images >= 0 and n_classes >= 1");
  }
  if (!(p.correlation >= -1.0 && p.correlation <= 1.0)) {
    throw std::invalid_argument("synth: correlation must lie in [-1, 1]");
  }
  if (p.max_gts_per_image < 1 || p.dups_per_gt < 1 || p.fps_per_image < 0 ||
      p.max_gts_per_image + p.fps_per_image > cols * rows) {
    throw std::invalid_argument("synth: object counts do not fit the grid");
  }
  if (!(p.jitter >= 0.0 && p.jitter <= 0.3)) {
    throw std::invalid_argument("synth: jitter must lie in [0, 0.3]");
  }

  Rng rng(seed);
  Dataset ds;
  for (int c = 0; c < n_classes; ++c) {
    ds.categories.push_back({c + 1, "class_" + std::to_string(c + 1)});
  }
  ds.raw_dets.emplace();
  ds.final_dets.emplace();

  std::vector<int> cells(static_cast<std::size_t>(cols * rows));
  for (int image_id = 1; image_id <= n_images; ++image_id) {
    ds.images.push_back({image_id, p.width, p.height});
    const int n_gt = 1 + rng.below(p.max_gts_per_image);
    std::iota(cells.begin(), cells.end(), 0);
    rng.shuffle(cells);

    std::vector<GtObject> gts;
    for (int g = 0; g < n_gt; ++g) {
      const int cell = cells[g];
      gts.push_back({box_in_cell(rng, (cell % cols) * kCell,
                                 (cell / cols) * kCell),
                     rng.below(n_classes), image_id});
    }

    auto& raw = (*ds.raw_dets)[image_id];
    for (const auto& g : gts) {
      for (int d = 0; d < p.dups_per_gt; ++d) {
        RawDetection r{jitter_box(rng, g.box, p.jitter, p.width, p.height),
                       noise_scores(rng, n_classes)};
        r.class_scores[g.class_id] = rng.uniform(0.05, 1.0);
        raw.push_back(std::move(r));
      }
      ds.final_dets->push_back(
          {jitter_box(rng, g.box, p.jitter, p.width, p.height), g.class_id,
           rng.uniform(0.05, 1.0), image_id});
    }
    for (int f = 0; f < p.fps_per_image; ++f) {
      const int cell = cells[n_gt + f];
      const Box b = box_in_cell(rng, (cell % cols) * kCell, (cell / cols) * kCell);
      RawDetection r{b, noise_scores(rng, n_classes)};
      const int cls = rng.below(n_classes);
      r.class_scores[cls] = rng.uniform(0.05, 1.0);
      raw.push_back(std::move(r));
      ds.final_dets->push_back(
          {b, rng.below(n_classes), rng.uniform(0.05, 1.0), image_id});
    }

    const auto pos = match_positives(raw, gts, 0.5, PositiveAssigner::kMaxIou);
    const auto scores = knob_scores(rng, pos.ious(), p.correlation);
    for (std::size_t k = 0; k < pos.size(); ++k) {
      const auto& m = pos.entries[k];
      raw[m.det].class_scores[gts[m.gt].class_id] = scores[k];
    }
    ds.gts.insert(ds.gts.end(), gts.begin(), gts.end());
  }

  // Final true positives get knob-ordered scores per class.
  auto& finals = *ds.final_dets;
  for (int c = 0; c < n_classes; ++c) {
    std::vector<int> idx;
    std::vector<FinalDetection> subset;
    for (std::size_t i = 0; i < finals.size(); ++i) {
      if (finals[i].class_id == c) {
        idx.push_back(static_cast<int>(i));
        subset.push_back(finals[i]);
      }
    }
    std::vector<GtObject> class_gts;
    for (const auto& g : ds.gts) {
      if (g.class_id == c) class_gts.push_back(g);
    }
    const auto tps = match_tp(subset, class_gts, 0.5);
    const auto scores = knob_scores(rng, tps.ious(), p.correlation);
    for (std::size_t k = 0; k < tps.size(); ++k) {
      finals[idx[tps.entries[k].det]].score = scores[k];
    }
  }
  return ds;
}

}  // namespace corrdet
