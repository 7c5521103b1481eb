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

#include <filesystem>
#include <span>
#include <string>

#include "corrdet/bounds.hpp"
#include "corrdet/ingest.hpp"
#include "corrdet/metrics.hpp"
#include "json.hpp"

namespace corrdet {

// JSON views of evaluation results. Class ids are reported both as indices
// and, when `categories` covers them, as file category ids.
nlohmann::json to_json(const ApResult& ap,
                       std::span<const Category> categories = {});
nlohmann::json to_json(const CorrelationReport& report,
                       std::span<const Category> categories = {});
nlohmann::json to_json(const BoundReport& report,
                       std::span<const Category> categories = {});

// Serialized report text. Doubles are written in their shortest form that
// parses back to the identical value.
std::string dump_report(const nlohmann::json& report);

// Reads a report written by dump_report. Throws ParseError on malformed JSON
// and SchemaError when the document lacks a "command" string.
nlohmann::json load_report(const std::filesystem::path& path);
nlohmann::json parse_report(std::string_view text);

// Plot-ready PR curves: one row per point, columns
// category_id,iou_thr,rank,recall,precision.
std::string pr_curves_csv(std::span<const FinalDetection> dets,
                          std::span<const GtObject> gts,
                          std::span<const Category> categories,
                          std::span<const double> thresholds);

}  // namespace corrdet
