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

#include "corrdet/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "corrdet/errors.hpp"

namespace corrdet {
namespace {

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [&](double a) { return a == v.front(); });
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DegenerateInput("series lengths differ");
  }
  if (x.size() < 2) throw DegenerateInput("need at least two samples");
}

// Centered second moments, summed (not divided by n). A constant series gets
// exactly zero spread so that constancy tests do not depend on rounding.
struct Moments {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
};

Moments moments(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  Moments m;
  const bool cx = is_constant(x);
  const bool cy = is_constant(y);
  m.mean_x = cx ? x.front() : std::accumulate(x.begin(), x.end(), 0.0) / n;
  m.mean_y = cy ? y.front() : std::accumulate(y.begin(), y.end(), 0.0) / n;
  if (cx && cy) return m;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = cx ? 0.0 : x[i] - m.mean_x;
    const double dy = cy ? 0.0 : y[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const Moments m = moments(x, y);
  if (m.sxx == 0.0 || m.syy == 0.0) {
    throw DegenerateInput("pearson: zero variance");
  }
  return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[idx[j]] == values[idx[i]]) ++j;
    // Positions i..j-1 hold 1-based ranks i+1..j.
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = avg;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  return pearson(rx, ry);
}

double concordance(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double n = static_cast<double>(x.size());
  const Moments m = moments(x, y);
  const double gap = m.mean_x - m.mean_y;
  const double denom = m.sxx / n + m.syy / n + gap * gap;
  if (denom == 0.0) throw DegenerateInput("concordance: zero denominator");
  return std::clamp(2.0 * (m.sxy / n) / denom, -1.0, 1.0);
}

std::string_view to_string(Coefficient c) {
  switch (c) {
    case Coefficient::kSpearman:
      return "spearman";
    case Coefficient::kConcordance:
      return "concordance";
    case Coefficient::kPearson:
      return "pearson";
  }
  return "unknown";
}

Coefficient parse_coefficient(std::string_view name) {
  if (name == "spearman") return Coefficient::kSpearman;
  if (name == "concordance") return Coefficient::kConcordance;
  if (name == "pearson") return Coefficient::kPearson;
  throw std::invalid_argument("unknown correlation coefficient: " +
                              std::string(name));
}

double correlation(Coefficient c, std::span<const double> x,
                   std::span<const double> y) {
  switch (c) {
    case Coefficient::kSpearman:
      return spearman(x, y);
    case Coefficient::kConcordance:
      return concordance(x, y);
    case Coefficient::kPearson:
      return pearson(x, y);
  }
  throw std::invalid_argument("unknown correlation coefficient");
}

}  // namespace corrdet
