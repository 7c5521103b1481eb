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

#include "corrdet/softrank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace corrdet {
namespace {

struct PavBlock {
  int begin;
  int end;
  double sum;  // sum of targets over the block

  double mean() const { return sum / static_cast<double>(end - begin); }
};

// Non-increasing isotonic regression of `target` by pool adjacent violators.
std::vector<PavBlock> pav_decreasing(std::span<const double> target) {
  std::vector<PavBlock> stack;
  stack.reserve(target.size());
  for (std::size_t k = 0; k < target.size(); ++k) {
    stack.push_back({static_cast<int>(k), static_cast<int>(k) + 1, target[k]});
    while (stack.size() > 1) {
      const PavBlock& cur = stack.back();
      const PavBlock& prev = stack[stack.size() - 2];
      if (prev.mean() >= cur.mean()) break;
      const PavBlock merged{prev.begin, cur.end, prev.sum + cur.sum};
      stack.pop_back();
      stack.back() = merged;
    }
  }
  return stack;
}

}  // namespace

SoftRankResult soft_rank(std::span<const double> values, double epsilon,
                         RankOrder rank_order) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("soft_rank: epsilon must be positive");
  }
  const int n = static_cast<int>(values.size());
  const double sign = rank_order == RankOrder::kLargestHighest ? 1.0 : -1.0;

  SoftRankResult out;
  out.epsilon = epsilon;
  out.rank_order = rank_order;
  out.ranks.assign(n, 0.0);
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), 0);

  std::vector<double> z(n);
  for (int i = 0; i < n; ++i) z[i] = sign * values[i] / epsilon;
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](int a, int b) { return z[a] > z[b]; });

  // Sorted position k carries the anchor rank n - k.
  std::vector<double> sorted(n);
  std::vector<double> target(n);
  for (int k = 0; k < n; ++k) {
    sorted[k] = z[out.order[k]];
    target[k] = sorted[k] - static_cast<double>(n - k);
  }

  for (const PavBlock& b : pav_decreasing(target)) {
    out.blocks.push_back({b.begin, b.end});
    const int m = b.end - b.begin;
    if (m == 1) {
      out.ranks[out.order[b.begin]] = static_cast<double>(n - b.begin);
      continue;
    }
    // Anchor ranks n-begin .. n-end+1 average to this.
    const double anchor_mean =
        static_cast<double>(2 * n - b.begin - b.end + 1) / 2.0;
    if (sorted[b.begin] == sorted[b.end - 1]) {
      for (int k = b.begin; k < b.end; ++k) out.ranks[out.order[k]] = anchor_mean;
      continue;
    }
    double sorted_sum = 0.0;
    for (int k = b.begin; k < b.end; ++k) sorted_sum += sorted[k];
    const double sorted_mean = sorted_sum / static_cast<double>(m);
    for (int k = b.begin; k < b.end; ++k) {
      out.ranks[out.order[k]] = anchor_mean + (sorted[k] - sorted_mean);
    }
  }
  return out;
}

std::vector<double> soft_rank_vjp(const SoftRankResult& result,
                                  std::span<const double> upstream) {
  const std::size_t n = result.ranks.size();
  if (upstream.size() != n) {
    throw std::invalid_argument("soft_rank_vjp: upstream length mismatch");
  }
  const double sign =
      result.rank_order == RankOrder::kLargestHighest ? 1.0 : -1.0;
  const double scale = sign / result.epsilon;

  std::vector<double> grad(n, 0.0);
  for (const RankBlock& b : result.blocks) {
    if (b.size() == 1) continue;
    double mean = 0.0;
    for (int k = b.begin; k < b.end; ++k) mean += upstream[result.order[k]];
    mean /= static_cast<double>(b.size());
    for (int k = b.begin; k < b.end; ++k) {
      const int i = result.order[k];
      grad[i] = scale * (upstream[i] - mean);
    }
  }
  return grad;
}

}  // namespace corrdet
