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

#include "corrdet/bounds.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "corrdet/correlation.hpp"
#include "corrdet/ingest.hpp"
#include "oracles.hpp"

namespace corrdet {
namespace {

using V = std::vector<double>;

MatchSet match_set(const V& ious, const V& scores) {
  MatchSet m;
  for (std::size_t i = 0; i < ious.size(); ++i) {
    m.entries.push_back({static_cast<int>(i), static_cast<int>(i), ious[i],
                         scores[i]});
  }
  return m;
}

Box object(int k) { return {20.0 * k, 0, 20.0 * k + 10, 10}; }
Box at_iou(int k, double v) { return {20.0 * k, 0, 20.0 * k + 10 * v, 10}; }

TEST(RerankScoresTest, Examples) {
  const V ious{0.55, 0.95, 0.75};
  const V up = rerank_scores(match_set(ious, {0.9, 0.3, 0.5}),
                             RerankDirection::kPositive);
  EXPECT_EQ(up, (V{0.3, 0.9, 0.5}));
  EXPECT_EQ(rerank_scores(match_set(ious, up), RerankDirection::kPositive),
            up);
  EXPECT_EQ(rerank_scores(match_set(ious, up), RerankDirection::kNegative),
            (V{0.9, 0.3, 0.5}));
  EXPECT_EQ(rerank_scores(match_set({0.55, 0.9}, {0.8, 0.6}),
                          RerankDirection::kPositive),
            (V{0.6, 0.8}));
}

TEST(RerankScoresTest, IouTiesBreakByDetectionIndex) {
  const V out = rerank_scores(match_set({0.7, 0.7, 0.9}, {0.1, 0.5, 0.3}),
                              RerankDirection::kPositive);
  EXPECT_EQ(out, (V{0.1, 0.3, 0.5}));
}

TEST(RerankScoresTest, ReachesExtremesOverAllPermutations) {
  oracle::Rng rng(51);
  for (int t = 0; t < 40; ++t) {
    const int n = rng.integer(2, 6);
    const V ious = rng.vec(n, 0.5, 1.0), scores = rng.vec(n);
    const auto m = match_set(ious, scores);
    const V up = rerank_scores(m, RerankDirection::kPositive);
    const V down = rerank_scores(m, RerankDirection::kNegative);
    double best = -2, worst = 2;
    oracle::for_each_permutation(scores, [&](const V& p) {
      best = std::max(best, oracle::spearman(ious, p));
      worst = std::min(worst, oracle::spearman(ious, p));
    });
    EXPECT_NEAR(spearman(ious, up), best, 1e-12);
    EXPECT_NEAR(spearman(ious, down), worst, 1e-12);

    V a = up, b = scores;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}

TEST(RerankImageLevelTest, TouchesOnlyGroundTruthClassOfPositives) {
  const std::vector<GtObject> gts = {{object(0), 1, 0}, {object(1), 0, 0}};
  const std::vector<RawDetection> dets = {
      {at_iou(0, 0.6), {0.11, 0.9, 0.12}},
      {at_iou(0, 0.95), {0.21, 0.3, 0.22}},
      {at_iou(1, 0.8), {0.5, 0.31, 0.32}},
      {{300, 300, 310, 310}, {0.41, 0.42, 0.43}},
  };
  const auto m = match_positives(dets, gts);
  ASSERT_EQ(m.size(), 3u);
  const auto out = rerank_image_level(dets, gts, m, RerankDirection::kPositive);
  // Positive IoUs 0.6, 0.95, 0.8 receive the GT-class scores 0.3, 0.9, 0.5
  // in IoU order.
  EXPECT_EQ(out[0].class_scores, (V{0.11, 0.3, 0.12}));
  EXPECT_EQ(out[1].class_scores, (V{0.21, 0.9, 0.22}));
  EXPECT_EQ(out[2].class_scores, (V{0.5, 0.31, 0.32}));
  EXPECT_EQ(out[3], dets[3]);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    EXPECT_EQ(out[i].box, dets[i].box);
  }
}

TEST(RerankImageLevelTest, SinglePositiveIsIdentity) {
  const std::vector<GtObject> gts = {{object(0), 0, 0}};
  const std::vector<RawDetection> dets = {{at_iou(0, 0.7), {0.4}}};
  const auto m = match_positives(dets, gts);
  EXPECT_EQ(rerank_image_level(dets, gts, m, RerankDirection::kNegative),
            dets);
}

TEST(RerankClassLevelTest, FalsePositivesAndSingletonsUnchanged) {
  const std::vector<GtObject> gts = {{object(0), 0, 0}};
  const std::vector<FinalDetection> fps = {{{300, 0, 310, 10}, 0, 0.9, 0},
                                           {{400, 0, 410, 10}, 0, 0.2, 0}};
  EXPECT_EQ(rerank_class_level(fps, match_tp(fps, gts, 0.5),
                               RerankDirection::kPositive),
            fps);
  std::vector<FinalDetection> one = fps;
  one.push_back({at_iou(0, 0.8), 0, 0.5, 0});
  EXPECT_EQ(rerank_class_level(one, match_tp(one, gts, 0.5),
                               RerankDirection::kNegative),
            one);
}

TEST(RerankClassLevelTest, WorkedExample) {
  const std::vector<GtObject> gts = {{object(0), 0, 0}, {object(1), 0, 0}};
  const std::vector<FinalDetection> dets = {{at_iou(0, 0.55), 0, 0.8, 0},
                                            {at_iou(1, 0.9), 0, 0.6, 0}};
  const auto out = rerank_class_level(dets, match_tp(dets, gts, 0.5),
                                      RerankDirection::kPositive);
  EXPECT_EQ(out[0].score, 0.6);
  EXPECT_EQ(out[1].score, 0.8);
}

TEST(ClassBoundReportTest, PerfectlyCorrelatedIsAFixedPoint) {
  std::vector<GtObject> gts;
  std::vector<FinalDetection> dets;
  for (int k = 0; k < 5; ++k) {
    gts.push_back({object(k), 0, 0});
    dets.push_back({at_iou(k, 0.55 + 0.09 * k), 0, 0.1 + 0.15 * k, 0});
  }
  dets.push_back({{500, 0, 510, 10}, 0, 0.45, 0});
  const auto r = class_bound_report(dets, gts, BoundConfig{});
  EXPECT_EQ(r.after.ap.ap_c, r.before.ap.ap_c);
  EXPECT_EQ(r.after.correlation.beta_cls, 1.0);
}

TEST(ClassBoundReportTest, NoTruePositivesWarns) {
  const std::vector<GtObject> gts = {{object(0), 0, 0}};
  const std::vector<FinalDetection> dets = {{{500, 0, 510, 10}, 0, 0.5, 0}};
  const auto r = class_bound_report(dets, gts, BoundConfig{});
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.after.ap.ap_c, r.before.ap.ap_c);
  EXPECT_FALSE(r.after.correlation.beta_cls.has_value());
}

TEST(ClassBoundReportTest, SyntheticBoundsBracketAndKeepApFifty) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthParams p;
    p.correlation = 0.0;
    const Dataset ds = synth(seed, 15, 3, p);
    BoundConfig up, down;
    down.direction = RerankDirection::kNegative;
    const auto hi = class_bound_report(*ds.final_dets, ds.gts, up);
    const auto lo = class_bound_report(*ds.final_dets, ds.gts, down);
    EXPECT_EQ(hi.after.ap.at(0.5), hi.before.ap.at(0.5));
    EXPECT_EQ(lo.after.ap.at(0.5), lo.before.ap.at(0.5));
    for (const double t : coco_iou_thresholds()) {
      EXPECT_LE(lo.after.ap.at(t), hi.before.ap.at(t) + 1e-12);
      EXPECT_LE(hi.before.ap.at(t), hi.after.ap.at(t) + 1e-12);
    }
    EXPECT_EQ(hi.after.correlation.beta_cls, 1.0);
    EXPECT_EQ(lo.after.correlation.beta_cls, -1.0);
    EXPECT_LE(*lo.after.correlation.beta_cls, *hi.before.correlation.beta_cls);
    EXPECT_GE(*hi.after.correlation.beta_cls, *hi.before.correlation.beta_cls);
  }
}

TEST(ImageBoundReportTest, SyntheticImageLevelBounds) {
  SynthParams p;
  const Dataset ds = synth(3, 20, 2, p);
  BoundConfig up, down;
  down.direction = RerankDirection::kNegative;
  const auto hi = image_bound_report(*ds.raw_dets, ds.gts, up);
  const auto lo = image_bound_report(*ds.raw_dets, ds.gts, down);
  EXPECT_EQ(hi.level, CorrelationLevel::kImage);
  EXPECT_EQ(hi.after.correlation.beta_img, 1.0);
  EXPECT_EQ(lo.after.correlation.beta_img, -1.0);
  EXPECT_GE(hi.after.ap.ap_c, lo.after.ap.ap_c);

  // Scores move, the score multiset of each detection set does not.
  const auto reranked = rerank_dataset_image_level(
      *ds.raw_dets, ds.gts, 0.5, PositiveAssigner::kMaxIou,
      RerankDirection::kPositive);
  for (const auto& [id, dets] : *ds.raw_dets) {
    V before, after;
    const auto& moved = reranked.at(id);
    ASSERT_EQ(moved.size(), dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
      EXPECT_EQ(moved[i].box, dets[i].box);
      before.insert(before.end(), dets[i].class_scores.begin(),
                    dets[i].class_scores.end());
      after.insert(after.end(), moved[i].class_scores.begin(),
                   moved[i].class_scores.end());
    }
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    EXPECT_EQ(before, after);
  }
}

TEST(BoundsParseTest, DirectionAndLevel) {
  EXPECT_EQ(parse_direction("+1"), RerankDirection::kPositive);
  EXPECT_EQ(parse_direction("1"), RerankDirection::kPositive);
  EXPECT_EQ(parse_direction("-1"), RerankDirection::kNegative);
  EXPECT_THROW(parse_direction("0"), std::invalid_argument);
  EXPECT_EQ(parse_level("image"), CorrelationLevel::kImage);
  EXPECT_EQ(parse_level("class"), CorrelationLevel::kClass);
  EXPECT_THROW(parse_level("batch"), std::invalid_argument);
}

}  // namespace
}  // namespace corrdet
