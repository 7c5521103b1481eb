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

#include "corrdet/report.hpp"

#include <sstream>

#include "corrdet/errors.hpp"

namespace corrdet {

using nlohmann::json;

namespace {

json class_ref(int class_id, std::span<const Category> categories) {
  json j = {{"class_id", class_id}};
  if (class_id >= 0 && static_cast<std::size_t>(class_id) < categories.size()) {
    j["category_id"] = categories[class_id].id;
    j["name"] = categories[class_id].name;
  }
  return j;
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json snapshot(const EvalSnapshot& s, std::span<const Category> categories) {
  return {{"ap", to_json(s.ap, categories)},
          {"correlation", to_json(s.correlation, categories)}};
}

}  // namespace

json to_json(const ApResult& ap, std::span<const Category> categories) {
  json j;
  j["ap_c"] = ap.ap_c;
  j["per_threshold"] = json::array();
  for (const auto& [t, v] : ap.per_threshold) {
    j["per_threshold"].push_back({{"iou_thr", t}, {"ap", v}});
  }
  j["per_class"] = json::array();
  for (std::size_t c = 0; c < ap.class_ids.size(); ++c) {
    json row = class_ref(ap.class_ids[c], categories);
    row["ap"] = ap.per_class[c];
    j["per_class"].push_back(std::move(row));
  }
  return j;
}

json to_json(const CorrelationReport& r, std::span<const Category> categories) {
  json j;
  j["beta_img"] = optional_number(r.beta_img);
  j["beta_cls"] = optional_number(r.beta_cls);
  j["per_image"] = json::array();
  for (const auto& [id, b] : r.per_image) {
    j["per_image"].push_back({{"image_id", id}, {"beta", b}});
  }
  j["per_class"] = json::array();
  for (const auto& [id, b] : r.per_class) {
    json row = class_ref(id, categories);
    row["beta"] = b;
    j["per_class"].push_back(std::move(row));
  }
  j["skipped_images"] = r.skipped_images;
  j["skipped_classes"] = r.skipped_classes;
  return j;
}

json to_json(const BoundReport& r, std::span<const Category> categories) {
  json j;
  j["level"] = std::string(to_string(r.level));
  j["direction"] = std::string(to_string(r.direction));
  j["before"] = snapshot(r.before, categories);
  j["after"] = snapshot(r.after, categories);
  j["warnings"] = r.warnings;
  return j;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

json parse_report(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
  if (!j.is_object() || !j.contains("command") || !j["command"].is_string()) {
    throw SchemaError("report: missing 'command'");
  }
  return j;
}

json load_report(const std::filesystem::path& path) {
  return parse_report(read_text(path));
}

std::string pr_curves_csv(std::span<const FinalDetection> dets,
                          std::span<const GtObject> gts,
                          std::span<const Category> categories,
                          std::span<const double> thresholds) {
  std::map<int, std::vector<FinalDetection>> class_dets;
  std::map<int, std::vector<GtObject>> class_gts;
  for (const auto& d : dets) class_dets[d.class_id].push_back(d);
  for (const auto& g : gts) class_gts[g.class_id].push_back(g);

  std::ostringstream out;
  out.precision(17);
  out << "category_id,iou_thr,rank,recall,precision\n";
  for (const auto& [cls, g] : class_gts) {
    const int cat = static_cast<std::size_t>(cls) < categories.size()
                        ? categories[cls].id
                        : cls;
    const auto& d = class_dets[cls];
    for (const double t : thresholds) {
      const auto curve = pr_curve(d, g, t);
      for (std::size_t k = 0; k < curve.size(); ++k) {
        out << cat << ',' << t << ',' << k + 1 << ',' << curve[k].recall << ','
            << curve[k].precision << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace corrdet
