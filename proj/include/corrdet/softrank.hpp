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
#include <vector>

namespace corrdet {

enum class RankOrder {
  // The largest value receives rank n.
  kLargestHighest,
  // The largest value receives rank 1.
  kLargestLowest,
};

// A contiguous run [begin, end) of sorted positions that pool-adjacent-
// violators merged into one block.
struct RankBlock {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  friend bool operator==(const RankBlock&, const RankBlock&) = default;
};

struct SoftRankResult {
  std::vector<double> ranks;
  // order[k] is the input index at descending sorted position k.
  std::vector<int> order;
  std::vector<RankBlock> blocks;
  double epsilon = 1.0;
  RankOrder rank_order = RankOrder::kLargestHighest;
};

// Quadratically regularized soft ranks: the Euclidean projection of
// values / epsilon onto the permutahedron of (1, ..., n). Computed by a
// descending sort followed by non-increasing isotonic regression (pool
// adjacent violators). As epsilon shrinks, the ranks approach hard ranks; as
// it grows, they approach (n + 1) / 2 everywhere.
//
// Requires epsilon > 0 (std::invalid_argument otherwise).
SoftRankResult soft_rank(std::span<const double> values, double epsilon,
                         RankOrder rank_order = RankOrder::kLargestHighest);

// Vector-Jacobian product d<upstream, ranks>/d values. Within a block the
// Jacobian is (I - 11^T / |block|) / epsilon; it is zero across blocks. At
// block-boundary kinks this is the block sub-gradient.
std::vector<double> soft_rank_vjp(const SoftRankResult& result,
                                  std::span<const double> upstream);

}  // namespace corrdet
