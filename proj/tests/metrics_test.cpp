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

#include "corrdet/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "corrdet/correlation.hpp"
#include "corrdet/errors.hpp"
#include "oracles.hpp"

namespace corrdet {
namespace {

// Object k of a test image: a 10x10 box at x = 20k.
Box object(int k) { return {20.0 * k, 0, 20.0 * k + 10, 10}; }

// A box over object k with the given IoU (shrunk from the right).
Box at_iou(int k, double v) {
  return {20.0 * k, 0, 20.0 * k + 10 * v, 10};
}

// Detections for a ranked TP/FP pattern: TPs cover successive objects, FPs
// sit far away. Scores descend with rank.
std::vector<FinalDetection> pattern_dets(const std::vector<bool>& tp) {
  std::vector<FinalDetection> dets;
  int next = 0;
  for (std::size_t k = 0; k < tp.size(); ++k) {
    const Box b = tp[k] ? object(next++) : Box{500, 500, 510, 510};
    dets.push_back({b, 0, 1.0 - 0.1 * static_cast<double>(k), 0});
  }
  return dets;
}

std::vector<GtObject> objects(int n, int cls = 0, int image = 0) {
  std::vector<GtObject> gts;
  for (int k = 0; k < n; ++k) gts.push_back({object(k), cls, image});
  return gts;
}

TEST(PrCurveTest, Examples) {
  EXPECT_EQ(pr_curve(pattern_dets({true}), objects(1), 0.5),
            (std::vector<PrPoint>{{1, 1}}));
  EXPECT_EQ(pr_curve(pattern_dets({true, false}), objects(1), 0.5),
            (std::vector<PrPoint>{{1, 1}, {1, 0.5}}));
  const auto c = pr_curve(pattern_dets({true, false, true}), objects(2), 0.5);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (PrPoint{0.5, 1.0}));
  EXPECT_EQ(c[1], (PrPoint{0.5, 0.5}));
  EXPECT_EQ(c[2].recall, 1.0);
  EXPECT_DOUBLE_EQ(c[2].precision, 2.0 / 3.0);
}

TEST(PrCurveTest, NoGroundTruthThrows) {
  EXPECT_THROW(pr_curve(pattern_dets({false}), {}, 0.5), NoGroundTruth);
}

TEST(AveragePrecisionTest, Examples) {
  EXPECT_EQ(average_precision(std::vector<PrPoint>{{1, 1}}), 1.0);
  EXPECT_EQ(average_precision(std::vector<PrPoint>{{0, 0}, {0, 0}}), 0.0);
  EXPECT_EQ(average_precision(std::vector<PrPoint>{}), 0.0);
  const auto c = pr_curve(pattern_dets({true, false, true}), objects(2), 0.5);
  const double ap = average_precision(c);
  EXPECT_NEAR(ap, (51.0 + 50.0 * 2.0 / 3.0) / 101.0, 1e-15);
  EXPECT_NEAR(ap, 0.8350, 5e-5);
}

TEST(AveragePrecisionTest, MatchesBruteForceOnAllSmallPatterns) {
  for (int n_det = 0; n_det <= 6; ++n_det) {
    for (int n_gt = 1; n_gt <= 3; ++n_gt) {
      for (int mask = 0; mask < (1 << n_det); ++mask) {
        std::vector<bool> tp;
        for (int k = 0; k < n_det; ++k) tp.push_back((mask >> k) & 1);
        if (std::count(tp.begin(), tp.end(), true) > n_gt) continue;
        const auto curve = pr_curve(pattern_dets(tp), objects(n_gt), 0.5);
        const auto expected = oracle::pattern_curve(tp, n_gt);
        ASSERT_EQ(curve.size(), expected.size());
        for (std::size_t k = 0; k < curve.size(); ++k) {
          EXPECT_EQ(curve[k].recall, expected[k].recall);
          EXPECT_EQ(curve[k].precision, expected[k].precision);
        }
        EXPECT_EQ(average_precision(curve), oracle::ap101(expected));
      }
    }
  }
}

TEST(CocoApTest, PerfectDetections) {
  std::vector<FinalDetection> dets;
  for (int k = 0; k < 3; ++k) dets.push_back({at_iou(k, 0.96), 0, 0.9, 0});
  const ApResult r = coco_ap(dets, objects(3));
  EXPECT_EQ(r.ap_c, 1.0);
  for (const auto& [t, ap] : r.per_threshold) EXPECT_EQ(ap, 1.0);
}

TEST(CocoApTest, LooseDetectionsOnlyCountAtFifty) {
  std::vector<FinalDetection> dets;
  for (int k = 0; k < 2; ++k) dets.push_back({at_iou(k, 0.52), 0, 0.9, 0});
  const ApResult r = coco_ap(dets, objects(2));
  EXPECT_EQ(r.at(0.5), 1.0);
  for (const auto& [t, ap] : r.per_threshold) {
    if (t > 0.5) EXPECT_EQ(ap, 0.0);
  }
  EXPECT_DOUBLE_EQ(r.ap_c, 0.1);
}

TEST(CocoApTest, NoDetectionsAndNoGroundTruth) {
  EXPECT_EQ(coco_ap({}, objects(2)).ap_c, 0.0);
  EXPECT_THROW(coco_ap(pattern_dets({true}), {}), EmptyEvaluation);
  EXPECT_TRUE(std::isnan(coco_ap({}, objects(1)).at(0.42)));
}

TEST(CocoApTest, ClassesWithoutGroundTruthAreExcluded) {
  std::vector<FinalDetection> dets = {{at_iou(0, 0.96), 0, 0.9, 0},
                                      {at_iou(0, 0.96), 3, 0.9, 0}};
  const ApResult r = coco_ap(dets, objects(1));
  EXPECT_EQ(r.class_ids, std::vector<int>{0});
  EXPECT_EQ(r.ap_c, 1.0);
}

TEST(CocoApTest, ThresholdsAndAveraging) {
  const auto t = coco_iou_thresholds();
  ASSERT_EQ(t.size(), 10u);
  EXPECT_EQ(t.front(), 0.5);
  EXPECT_EQ(t.back(), 0.95);

  oracle::Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GtObject> gts;
    std::vector<FinalDetection> dets;
    for (int cls = 0; cls < 2; ++cls) {
      for (int k = 0; k < 4; ++k) {
        gts.push_back({object(k), cls, 0});
        for (int d = 0; d < 2; ++d) {
          dets.push_back({at_iou(k, rng.uniform(0.3, 1.0)), cls,
                          rng.uniform(), 0});
        }
      }
    }
    const ApResult r = coco_ap(dets, gts);
    double total = 0;
    for (std::size_t i = 0; i < r.per_threshold.size(); ++i) {
      const double ap = r.per_threshold[i].second;
      EXPECT_GE(ap, 0.0);
      EXPECT_LE(ap, 1.0);
      if (i > 0) EXPECT_LE(ap, r.per_threshold[i - 1].second);
      total += ap;
    }
    EXPECT_NEAR(r.ap_c, total / 10, 1e-15);

    // Order invariance (scores are distinct with probability one).
    std::vector<FinalDetection> rev(dets.rbegin(), dets.rend());
    EXPECT_EQ(coco_ap(rev, gts).ap_c, r.ap_c);
  }
}

ImageSample image(int id, const std::vector<double>& ious,
                  const std::vector<double>& scores) {
  ImageSample s;
  s.image_id = id;
  s.gts = objects(static_cast<int>(ious.size()), 0, id);
  for (std::size_t k = 0; k < ious.size(); ++k) {
    s.dets.push_back({at_iou(static_cast<int>(k), ious[k]), {scores[k]}});
  }
  return s;
}

TEST(BetaImgTest, Examples) {
  const std::vector<ImageSample> one = {image(1, {0.6, 0.8}, {0.2, 0.9})};
  EXPECT_EQ(beta_img(one).beta_img, 1.0);

  const std::vector<ImageSample> two = {image(1, {0.6, 0.8}, {0.2, 0.9}),
                                        image(2, {0.6, 0.8}, {0.9, 0.2})};
  EXPECT_EQ(beta_img(two).beta_img, 0.0);

  const std::vector<ImageSample> skip = {image(1, {0.6, 0.8}, {0.2, 0.9}),
                                         image(2, {0.7}, {0.5})};
  const auto r = beta_img(skip);
  EXPECT_EQ(r.beta_img, 1.0);
  EXPECT_EQ(r.skipped_images, 1);
  ASSERT_EQ(r.per_image.size(), 1u);
  EXPECT_EQ(r.per_image[0].first, 1);
}

TEST(BetaImgTest, NothingEvaluableThrows) {
  const std::vector<ImageSample> none = {image(1, {0.7}, {0.5})};
  EXPECT_THROW(beta_img(none), EmptyEvaluation);
}

TEST(BetaImgTest, EqualsSpearmanPerImageAndIgnoresThreads) {
  oracle::Rng rng(42);
  std::vector<ImageSample> images;
  for (int id = 0; id < 30; ++id) {
    const int n = rng.integer(2, 5);
    images.push_back(image(id, rng.vec(n, 0.55, 1.0), rng.vec(n)));
  }
  const auto r = beta_img(images);
  ASSERT_EQ(r.per_image.size(), images.size());
  double mean = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto m = match_positives(images[i].dets, images[i].gts);
    EXPECT_EQ(r.per_image[i].second, spearman(m.ious(), m.scores()));
    EXPECT_GE(r.per_image[i].second, -1.0);
    EXPECT_LE(r.per_image[i].second, 1.0);
    mean += r.per_image[i].second;
  }
  EXPECT_NEAR(*r.beta_img, mean / images.size(), 1e-15);

  BetaImgOptions opts;
  opts.threads = 8;
  const auto p = beta_img(images, opts);
  EXPECT_EQ(p.per_image, r.per_image);
  EXPECT_EQ(p.beta_img, r.beta_img);
}

TEST(BetaClsTest, Examples) {
  const std::vector<double> ious{0.55, 0.95, 0.75}, scores{0.3, 0.9, 0.5};
  std::vector<FinalDetection> dets;
  for (int k = 0; k < 3; ++k) {
    dets.push_back({at_iou(k, ious[k]), 0, scores[k], 0});
  }
  EXPECT_EQ(beta_cls(dets, objects(3)).beta_cls, 1.0);

  for (int k = 0; k < 3; ++k) dets[k].score = 1.2 - scores[k];
  EXPECT_EQ(beta_cls(dets, objects(3)).beta_cls, -1.0);
}

TEST(BetaClsTest, MeanOverClasses) {
  // Score ranks (4,1,2,3,5) give spearman 0.4; (2,1,4,3,5) give 0.8.
  const std::vector<double> ious{0.55, 0.65, 0.75, 0.85, 0.95};
  const std::vector<std::vector<double>> scores = {{0.4, 0.1, 0.2, 0.3, 0.5},
                                                   {0.2, 0.1, 0.4, 0.3, 0.5}};
  std::vector<GtObject> gts;
  std::vector<FinalDetection> dets;
  for (int cls = 0; cls < 2; ++cls) {
    for (int k = 0; k < 5; ++k) {
      gts.push_back({object(k), cls, 0});
      dets.push_back({at_iou(k, ious[k]), cls, scores[cls][k], 0});
    }
  }
  const auto r = beta_cls(dets, gts);
  ASSERT_EQ(r.per_class.size(), 2u);
  EXPECT_NEAR(r.per_class[0].second, 0.4, 1e-12);
  EXPECT_NEAR(r.per_class[1].second, 0.8, 1e-12);
  EXPECT_NEAR(*r.beta_cls, 0.6, 1e-12);
}

TEST(GroupImagesTest, UnionOfIdsInOrder) {
  std::map<int, std::vector<RawDetection>> raw;
  raw[3] = {{object(0), {0.5}}};
  raw[1] = {};
  const std::vector<GtObject> gts = {{object(0), 0, 2}, {object(1), 0, 3}};
  const auto samples = group_images(raw, gts);
  ASSERT_EQ(samples.size(), 3u);
  EXPECT_EQ(samples[0].image_id, 1);
  EXPECT_EQ(samples[1].image_id, 2);
  EXPECT_EQ(samples[1].gts.size(), 1u);
  EXPECT_EQ(samples[2].dets.size(), 1u);
}

}  // namespace
}  // namespace corrdet
