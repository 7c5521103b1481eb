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

#include "corrdet/ingest.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "corrdet/errors.hpp"
#include "corrdet/metrics.hpp"
#include "corrdet/report.hpp"

namespace corrdet {
namespace {

namespace fs = std::filesystem;

const char* kGt = R"({
  "images": [{"id": 4, "width": 100, "height": 50}],
  "annotations": [{"id": 1, "image_id": 4, "category_id": 7,
                   "bbox": [2, 3, 4, 5], "iscrowd": 0}],
  "categories": [{"id": 3, "name": "cat"}, {"id": 7, "name": "dog"},
                 {"id": 9, "name": "fox"}]
})";

std::string gt_with_bbox(const std::string& bbox) {
  return R"({"images": [{"id": 1, "width": 10, "height": 10}],
    "annotations": [{"id": 1, "image_id": 1, "category_id": 1, "bbox": )" +
         bbox + R"(}], "categories": [{"id": 1, "name": "a"}]})";
}

TEST(ParseGtTest, MinimalFile) {
  const Dataset ds = parse_gt(kGt);
  ASSERT_EQ(ds.gts.size(), 1u);
  EXPECT_EQ(ds.gts[0].box, (Box{2, 3, 6, 8}));
  EXPECT_EQ(ds.gts[0].class_id, 1);
  EXPECT_EQ(ds.gts[0].image_id, 4);
  EXPECT_EQ(ds.num_classes(), 3);
  EXPECT_EQ(ds.class_index(9), 2);
  EXPECT_THROW(ds.class_index(5), ReferenceError);
  ASSERT_NE(ds.find_image(4), nullptr);
  EXPECT_EQ(ds.find_image(4)->width, 100);
  EXPECT_EQ(ds.find_image(5), nullptr);
}

TEST(ParseGtTest, Errors) {
  EXPECT_THROW(parse_gt(gt_with_bbox("[10, 10, 0, 5]")), SchemaError);
  EXPECT_THROW(parse_gt(gt_with_bbox("[1, 2, 3]")), SchemaError);
  EXPECT_THROW(parse_gt(gt_with_bbox("[20, 20, 5, 5]")), SchemaError);
  EXPECT_THROW(parse_gt("{not json"), ParseError);
  EXPECT_THROW(parse_gt(R"({"images": []})"), SchemaError);
  EXPECT_THROW(parse_gt(R"({"images": [], "annotations": [{"id": 1,
    "image_id": 1, "category_id": 1, "bbox": [0, 0, 1, 1]}],
    "categories": [{"id": 1, "name": "a"}]})"),
               ReferenceError);
  EXPECT_THROW(parse_gt(R"({"images": [{"id": 1, "width": 10, "height": 10}],
    "annotations": [{"id": 1, "image_id": 1, "category_id": 2,
    "bbox": [0, 0, 1, 1]}], "categories": [{"id": 1, "name": "a"}]})"),
               ReferenceError);
  EXPECT_THROW(parse_gt(R"({"images": [{"id": 1, "width": 10, "height": 10}],
    "annotations": [{"id": 1, "image_id": 1, "category_id": 1, "iscrowd": 1,
    "bbox": [0, 0, 1, 1]}], "categories": [{"id": 1, "name": "a"}]})"),
               SchemaError);
  EXPECT_THROW(load_gt("/nonexistent/gt.json"), ParseError);
}

TEST(ParseGtTest, BoxesAreClippedToTheImage) {
  const Dataset ds = parse_gt(gt_with_bbox("[8, -2, 5, 5]"));
  EXPECT_EQ(ds.gts[0].box, (Box{8, 0, 10, 3}));
}

TEST(ParseRawDetsTest, AcceptsAndRejects) {
  const Dataset gt = parse_gt(kGt);
  const auto raw = parse_raw_dets(R"({"detections": [{"image_id": 4,
    "bbox": [1, 1, 5, 5], "scores": [0.1, 0.7, 0.2]}]})",
                                  gt);
  ASSERT_EQ(raw.at(4).size(), 1u);
  EXPECT_EQ(raw.at(4)[0].class_scores, (std::vector<double>{0.1, 0.7, 0.2}));
  EXPECT_THROW(parse_raw_dets(R"({"detections": [{"image_id": 4,
    "bbox": [1, 1, 5, 5], "scores": [0.1, 0.7]}]})",
                              gt),
               DimensionError);
  EXPECT_THROW(parse_raw_dets(R"({"detections": [{"image_id": 4,
    "bbox": [1, 1, 5, 5], "scores": [0.1, 1.5, 0.2]}]})",
                              gt),
               SchemaError);
  EXPECT_THROW(parse_raw_dets(R"({"detections": [{"image_id": 8,
    "bbox": [1, 1, 5, 5], "scores": [0.1, 0.5, 0.2]}]})",
                              gt),
               ReferenceError);
}

TEST(ParseFinalDetsTest, CocoResults) {
  const Dataset gt = parse_gt(kGt);
  const auto dets = parse_final_dets(
      R"([{"image_id": 4, "category_id": 9, "bbox": [1, 2, 3, 4],
           "score": 0.75}])",
      gt);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0], (FinalDetection{{1, 2, 4, 6}, 2, 0.75, 4}));
  EXPECT_THROW(parse_final_dets(R"([{"image_id": 4, "category_id": 5,
    "bbox": [1, 2, 3, 4], "score": 0.5}])",
                                gt),
               ReferenceError);
  EXPECT_TRUE(parse_final_dets("[]", gt).empty());
  EXPECT_THROW(parse_final_dets("{}", gt), SchemaError);
}

TEST(SynthTest, DeterministicPerSeed) {
  const SynthParams p;
  EXPECT_EQ(synth(9, 12, 3, p), synth(9, 12, 3, p));
  EXPECT_FALSE(synth(9, 12, 3, p) == synth(10, 12, 3, p));
}

TEST(SynthTest, KnobExtremesFixImageCorrelation) {
  for (double knob : {1.0, -1.0}) {
    SynthParams p;
    p.correlation = knob;
    const Dataset ds = synth(5, 25, 3, p);
    const auto r = beta_img(group_images(*ds.raw_dets, ds.gts));
    ASSERT_TRUE(r.beta_img.has_value());
    EXPECT_EQ(*r.beta_img, knob);
    const auto c = beta_cls(*ds.final_dets, ds.gts);
    EXPECT_EQ(*c.beta_cls, knob);
  }
}

TEST(SynthTest, RejectsUnusableParams) {
  SynthParams p;
  p.correlation = 1.5;
  EXPECT_THROW(synth(1, 1, 1, p), std::invalid_argument);
  p = SynthParams{};
  p.max_gts_per_image = 20;
  EXPECT_THROW(synth(1, 1, 1, p), std::invalid_argument);
  EXPECT_THROW(synth(1, 1, 0, SynthParams{}), std::invalid_argument);
}

TEST(RoundTripTest, EmitThenParseIsIdentity) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthParams p;
    p.correlation = 0.3;
    const Dataset ds = synth(seed, 10, 4, p);
    Dataset back = parse_gt(emit_gt(ds));
    back.raw_dets = parse_raw_dets(emit_raw_dets(*ds.raw_dets, ds), back);
    back.final_dets =
        parse_final_dets(emit_final_dets(*ds.final_dets, ds), back);
    EXPECT_EQ(back, ds);
    EXPECT_EQ(emit_gt(back), emit_gt(ds));
  }
}

TEST(RoundTripTest, ThroughFiles) {
  const fs::path dir = fs::temp_directory_path() / "corrdet_ingest_test";
  fs::create_directories(dir);
  const Dataset ds = synth(2, 5, 2, SynthParams{});
  write_text(dir / "gt.json", emit_gt(ds));
  write_text(dir / "final.json", emit_final_dets(*ds.final_dets, ds));
  const Dataset gt = load_gt(dir / "gt.json");
  EXPECT_EQ(load_final_dets(dir / "final.json", gt), *ds.final_dets);
  fs::remove_all(dir);
}

TEST(ReportTest, DumpAndParse) {
  const nlohmann::json j{{"command", "eval"}, {"value", 0.1 + 0.2}};
  const auto back = parse_report(dump_report(j));
  EXPECT_EQ(back.at("value").get<double>(), 0.1 + 0.2);
  EXPECT_THROW(parse_report(R"({"value": 1})"), SchemaError);
  EXPECT_THROW(parse_report("[1,"), ParseError);
}

}  // namespace
}  // namespace corrdet
