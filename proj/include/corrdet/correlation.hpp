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

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace corrdet {

// Exact correlation coefficients over paired samples. All three use
// population (divide-by-n) moments and throw DegenerateInput when the
// coefficient is undefined: unequal lengths, n < 2, or a zero variance
// (zero denominator for concordance).

double pearson(std::span<const double> x, std::span<const double> y);

// Pearson on fractional ranks; tied values share their average rank.
double spearman(std::span<const double> x, std::span<const double> y);

// 2 cov(x, y) / (var x + var y + (mean x - mean y)^2).
double concordance(std::span<const double> x, std::span<const double> y);

// 1-based ascending ranks with ties averaged: [10, 30, 20, 20] -> [1, 4, 2.5,
// 2.5].
std::vector<double> fractional_ranks(std::span<const double> values);

enum class Coefficient { kSpearman, kConcordance, kPearson };

std::string_view to_string(Coefficient c);
// Accepts "spearman", "concordance", "pearson". Throws std::invalid_argument.
Coefficient parse_coefficient(std::string_view name);

double correlation(Coefficient c, std::span<const double> x,
                   std::span<const double> y);

}  // namespace corrdet
