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

#include <array>
#include <span>
#include <vector>

#include "corrdet/correlation.hpp"
#include "corrdet/geometry.hpp"

namespace corrdet {

enum class DegeneratePolicy {
  // Zero loss and zero gradient.
  kSkip,
};

struct LossConfig {
  Coefficient coefficient = Coefficient::kConcordance;
  double lambda_corr = 0.2;
  // Soft-rank regularization for the Spearman variant. Applied to scores
  // rescaled by the number of positives, i.e. soft_rank(scores, epsilon / n).
  // Below about 1.5 the soft ranks harden into singleton blocks early in
  // descent and misordered scores stop receiving gradient.
  double epsilon = 2.0;
  DegeneratePolicy degenerate_policy = DegeneratePolicy::kSkip;

  // Throws std::invalid_argument on a non-finite or negative lambda, or a
  // non-positive epsilon.
  void validate() const;
};

// Weights worth sweeping when tuning lambda_corr.
inline constexpr std::array<double, 6> kLambdaSweep = {0.1, 0.2, 0.3,
                                                       0.4, 0.5, 0.6};

// There is deliberately no IoU gradient: the loss only trains the classifier.
struct LossResult {
  double value = 0.0;
  std::vector<double> grad_scores;
  bool degenerate = false;
};

// 1 - rho(ious, scores) with gradient with respect to the scores only. The
// Spearman variant correlates the hard ranks of the IoUs with the soft ranks
// of the scores.
LossResult correlation_loss(std::span<const double> ious,
                            std::span<const double> scores,
                            const LossConfig& cfg);
LossResult correlation_loss(const MatchSet& matches, const LossConfig& cfg);

double total_loss(double l_od, double l_corr, double lambda_corr);

struct MultiStageLoss {
  double value = 0.0;
  std::vector<LossResult> stages;
};

// Sum of independent per-stage losses. Throws std::invalid_argument when
// `stages` is empty.
MultiStageLoss multi_stage_loss(std::span<const MatchSet> stages,
                                const LossConfig& cfg);

struct DescentStep {
  double loss = 0.0;
  // Exact Spearman between the IoUs and current scores; NaN when undefined.
  double spearman = 0.0;
};

// Plain gradient descent on the scores (IoUs fixed). Entry k of the trace
// describes the scores after k updates, so the trace has steps + 1 entries.
std::vector<DescentStep> descend_demo(std::span<const double> init_scores,
                                      std::span<const double> ious,
                                      const LossConfig& cfg, int steps,
                                      double lr);

}  // namespace corrdet
