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

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "corrdet/errors.hpp"
#include "json.hpp"

namespace corrdet {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

const json& field(const json& obj, const char* key, const char* where) {
  if (!obj.is_object()) {
    throw SchemaError(std::string(where) + ": expected an object");
  }
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(std::string(where) + ": missing field '" + key + "'");
  }
  return *it;
}

const json& array_field(const json& obj, const char* key, const char* where) {
  const json& v = field(obj, key, where);
  if (!v.is_array()) {
    throw SchemaError(std::string(where) + ": '" + key + "' must be an array");
  }
  return v;
}

int int_field(const json& obj, const char* key, const char* where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) {
    throw SchemaError(std::string(where) + ": '" + key +
                      "' must be an integer");
  }
  return v.get<int>();
}

double number(const json& v, const char* where) {
  if (!v.is_number()) throw SchemaError(std::string(where) + ": not a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(std::string(where) + ": not finite");
  return d;
}

std::array<double, 4> bbox_field(const json& obj, const char* where) {
  const json& v = array_field(obj, "bbox", where);
  if (v.size() != 4) {
    throw SchemaError(std::string(where) + ": bbox needs 4 numbers");
  }
  return {number(v[0], where), number(v[1], where), number(v[2], where),
          number(v[3], where)};
}

double unit_score(const json& v, const char* where) {
  const double s = number(v, where);
  if (s < 0.0 || s > 1.0) {
    throw SchemaError(std::string(where) + ": score outside [0, 1]");
  }
  return s;
}

const ImageInfo& image_ref(const Dataset& gt, int image_id,
                           const char* where) {
  const ImageInfo* img = gt.find_image(image_id);
  if (img == nullptr) {
    throw ReferenceError(std::string(where) + ": unknown image_id " +
                         std::to_string(image_id));
  }
  return *img;
}

Box clip_to_image(Box b, const ImageInfo& img, const char* where) {
  b.x1 = std::clamp(b.x1, 0.0, static_cast<double>(img.width));
  b.x2 = std::clamp(b.x2, 0.0, static_cast<double>(img.width));
  b.y1 = std::clamp(b.y1, 0.0, static_cast<double>(img.height));
  b.y2 = std::clamp(b.y2, 0.0, static_cast<double>(img.height));
  if (!b.valid()) {
    throw SchemaError(std::string(where) +
                      ": box is empty after clipping to the image");
  }
  return b;
}

json xywh(const Box& b) {
  return json::array({b.x1, b.y1, b.x2 - b.x1, b.y2 - b.y1});
}

}  // namespace

int Dataset::class_index(int category_id) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i].id == category_id) return static_cast<int>(i);
  }
  throw ReferenceError("unknown category_id " + std::to_string(category_id));
}

const ImageInfo* Dataset::find_image(int image_id) const {
  for (const auto& img : images) {
    if (img.id == image_id) return &img;
  }
  return nullptr;
}

Dataset parse_gt(std::string_view json_text) {
  const json root = parse_json(json_text);
  constexpr const char* kWhere = "ground truth";
  Dataset ds;

  std::set<int> category_ids;
  for (const json& c : array_field(root, "categories", kWhere)) {
    Category cat;
    cat.id = int_field(c, "id", "category");
    const json& name = field(c, "name", "category");
    if (!name.is_string()) throw SchemaError("category: name must be a string");
    cat.name = name.get<std::string>();
    if (!category_ids.insert(cat.id).second) {
      throw SchemaError("category: duplicate id " + std::to_string(cat.id));
    }
    ds.categories.push_back(std::move(cat));
  }

  std::set<int> image_ids;
  for (const json& im : array_field(root, "images", kWhere)) {
    ImageInfo img{int_field(im, "id", "image"), int_field(im, "width", "image"),
                  int_field(im, "height", "image")};
    if (img.width <= 0 || img.height <= 0) {
      throw SchemaError("image " + std::to_string(img.id) +
                        ": non-positive size");
    }
    if (!image_ids.insert(img.id).second) {
      throw SchemaError("image: duplicate id " + std::to_string(img.id));
    }
    ds.images.push_back(img);
  }

  for (const json& a : array_field(root, "annotations", kWhere)) {
    constexpr const char* kAnn = "annotation";
    int_field(a, "id", kAnn);
    const int image_id = int_field(a, "image_id", kAnn);
    const int category_id = int_field(a, "category_id", kAnn);
    const auto [x, y, w, h] = bbox_field(a, kAnn);
    if (const auto it = a.find("iscrowd"); it != a.end()) {
      if (!it->is_number_integer() || it->get<int>() != 0) {
        throw SchemaError("annotation: crowd annotations are not supported");
      }
    }
    if (w <= 0.0 || h <= 0.0) {
      throw SchemaError("annotation: bbox has non-positive width or height");
    }
    const ImageInfo& img = image_ref(ds, image_id, kAnn);
    GtObject g;
    g.box = clip_to_image(Box::from_xywh(x, y, w, h), img, kAnn);
    g.class_id = ds.class_index(category_id);
    g.image_id = image_id;
    ds.gts.push_back(g);
  }
  return ds;
}

Dataset load_gt(const std::filesystem::path& path) {
  return parse_gt(read_text(path));
}

RawDetectionsByImage parse_raw_dets(std::string_view json_text,
                                    const Dataset& gt) {
  const json root = parse_json(json_text);
  constexpr const char* kWhere = "raw detection";
  RawDetectionsByImage out;
  for (const json& d : array_field(root, "detections", "raw detections")) {
    const int image_id = int_field(d, "image_id", kWhere);
    const ImageInfo& img = image_ref(gt, image_id, kWhere);
    const auto [x1, y1, x2, y2] = bbox_field(d, kWhere);
    if (!(x2 > x1 && y2 > y1)) {
      throw SchemaError("raw detection: bbox needs x1 < x2 and y1 < y2");
    }
    const json& scores = array_field(d, "scores", kWhere);
    if (static_cast<int>(scores.size()) != gt.num_classes()) {
      throw DimensionError("raw detection: expected " +
                           std::to_string(gt.num_classes()) +
                           " scores, got " + std::to_string(scores.size()));
    }
    RawDetection r;
    r.box = clip_to_image(Box{x1, y1, x2, y2}, img, kWhere);
    r.class_scores.reserve(scores.size());
    for (const json& s : scores) r.class_scores.push_back(unit_score(s, kWhere));
    out[image_id].push_back(std::move(r));
  }
  return out;
}

RawDetectionsByImage load_raw_dets(const std::filesystem::path& path,
                                   const Dataset& gt) {
  return parse_raw_dets(read_text(path), gt);
}

std::vector<FinalDetection> parse_final_dets(std::string_view json_text,
                                             const Dataset& gt) {
  const json root = parse_json(json_text);
  constexpr const char* kWhere = "detection";
  if (!root.is_array()) {
    throw SchemaError("detections: expected a COCO results list");
  }
  std::vector<FinalDetection> out;
  out.reserve(root.size());
  for (const json& d : root) {
    const int image_id = int_field(d, "image_id", kWhere);
    const ImageInfo& img = image_ref(gt, image_id, kWhere);
    const int category_id = int_field(d, "category_id", kWhere);
    const auto [x, y, w, h] = bbox_field(d, kWhere);
    if (w <= 0.0 || h <= 0.0) {
      throw SchemaError("detection: bbox has non-positive width or height");
    }
    FinalDetection f;
    f.box = clip_to_image(Box::from_xywh(x, y, w, h), img, kWhere);
    f.class_id = gt.class_index(category_id);
    f.score = unit_score(field(d, "score", kWhere), kWhere);
    f.image_id = image_id;
    out.push_back(f);
  }
  return out;
}

std::vector<FinalDetection> load_final_dets(const std::filesystem::path& path,
                                            const Dataset& gt) {
  return parse_final_dets(read_text(path), gt);
}

std::string emit_gt(const Dataset& ds) {
  json root;
  root["images"] = json::array();
  for (const auto& img : ds.images) {
    root["images"].push_back(
        {{"id", img.id}, {"width", img.width}, {"height", img.height}});
  }
  root["annotations"] = json::array();
  int next_id = 1;
  for (const auto& g : ds.gts) {
    root["annotations"].push_back(
        {{"id", next_id++},
         {"image_id", g.image_id},
         {"category_id", ds.categories.at(g.class_id).id},
         {"bbox", xywh(g.box)},
         {"iscrowd", 0}});
  }
  root["categories"] = json::array();
  for (const auto& c : ds.categories) {
    root["categories"].push_back({{"id", c.id}, {"name", c.name}});
  }
  return root.dump(1) + "\n";
}

std::string emit_raw_dets(const RawDetectionsByImage& raw, const Dataset&) {
  json root;
  root["detections"] = json::array();
  for (const auto& [image_id, dets] : raw) {
    for (const auto& d : dets) {
      root["detections"].push_back(
          {{"image_id", image_id},
           {"bbox", json::array({d.box.x1, d.box.y1, d.box.x2, d.box.y2})},
           {"scores", d.class_scores}});
    }
  }
  return root.dump(1) + "\n";
}

std::string emit_final_dets(const std::vector<FinalDetection>& dets,
                            const Dataset& gt) {
  json root = json::array();
  for (const auto& d : dets) {
    root.push_back({{"image_id", d.image_id},
                    {"category_id", gt.categories.at(d.class_id).id},
                    {"bbox", xywh(d.box)},
                    {"score", d.score}});
  }
  return root.dump(1) + "\n";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace corrdet
