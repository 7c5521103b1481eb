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

#include "corrdet/corrloss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "corrdet/errors.hpp"
#include "corrdet/softrank.hpp"

namespace corrdet {
namespace {

struct Centered {
  std::vector<double> dx;
  std::vector<double> dy;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  double gap = 0.0;  // mean(x) - mean(y)
};

Centered center(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  Centered c;
  c.dx.resize(x.size());
  c.dy.resize(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    c.dx[i] = x[i] - mx;
    c.dy[i] = y[i] - my;
    c.sxx += c.dx[i] * c.dx[i];
    c.syy += c.dy[i] * c.dy[i];
    c.sxy += c.dx[i] * c.dy[i];
  }
  c.gap = mx - my;
  return c;
}

// d pearson(x, y) / dy.
std::vector<double> pearson_grad_y(std::span<const double> x,
                                   std::span<const double> y, double rho) {
  const Centered c = center(x, y);
  const double root = std::sqrt(c.sxx * c.syy);
  std::vector<double> g(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    g[i] = c.dx[i] / root - rho * c.dy[i] / c.syy;
  }
  return g;
}

// d concordance(x, y) / dy, with the summed-moment form
// 2 Sxy / (Sxx + Syy + n gap^2).
std::vector<double> concordance_grad_y(std::span<const double> x,
                                       std::span<const double> y) {
  const Centered c = center(x, y);
  const double n = static_cast<double>(x.size());
  const double denom = c.sxx + c.syy + n * c.gap * c.gap;
  std::vector<double> g(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d_num = 2.0 * c.dx[i];
    const double d_den = 2.0 * c.dy[i] - 2.0 * c.gap;
    g[i] = (d_num * denom - 2.0 * c.sxy * d_den) / (denom * denom);
  }
  return g;
}

LossResult skipped(std::size_t n) {
  LossResult r;
  r.grad_scores.assign(n, 0.0);
  r.degenerate = true;
  return r;
}

LossResult negate_into_loss(double rho, std::vector<double> drho) {
  LossResult r;
  r.value = 1.0 - rho;
  for (double& g : drho) g = -g;
  r.grad_scores = std::move(drho);
  return r;
}

}  // namespace

void LossConfig::validate() const {
  if (!std::isfinite(lambda_corr) || lambda_corr < 0.0) {
    throw std::invalid_argument("lambda_corr must be finite and >= 0");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be positive");
  }
}

LossResult correlation_loss(std::span<const double> ious,
                            std::span<const double> scores,
                            const LossConfig& cfg) {
  if (ious.size() != scores.size()) {
    throw std::invalid_argument("correlation_loss: length mismatch");
  }
  const std::size_t n = scores.size();
  if (n < 2) return skipped(n);

  try {
    switch (cfg.coefficient) {
      case Coefficient::kPearson: {
        const double rho = pearson(ious, scores);
        return negate_into_loss(rho, pearson_grad_y(ious, scores, rho));
      }
      case Coefficient::kConcordance: {
        const double rho = concordance(ious, scores);
        return negate_into_loss(rho, concordance_grad_y(ious, scores));
      }
      case Coefficient::kSpearman: {
        const auto hard = fractional_ranks(ious);
        const auto soft =
            soft_rank(scores, cfg.epsilon / static_cast<double>(n));
        const double rho = pearson(hard, soft.ranks);
        const auto upstream = pearson_grad_y(hard, soft.ranks, rho);
        return negate_into_loss(rho, soft_rank_vjp(soft, upstream));
      }
    }
  } catch (const DegenerateInput&) {
    return skipped(n);
  }
  throw std::invalid_argument("correlation_loss: unknown coefficient");
}

LossResult correlation_loss(const MatchSet& matches, const LossConfig& cfg) {
  const auto ious = matches.ious();
  const auto scores = matches.scores();
  return correlation_loss(ious, scores, cfg);
}

double total_loss(double l_od, double l_corr, double lambda_corr) {
  return l_od + lambda_corr * l_corr;
}

MultiStageLoss multi_stage_loss(std::span<const MatchSet> stages,
                                const LossConfig& cfg) {
  if (stages.empty()) {
    throw std::invalid_argument("multi_stage_loss: no stages");
  }
  MultiStageLoss out;
  for (const MatchSet& stage : stages) {
    out.stages.push_back(correlation_loss(stage, cfg));
    out.value += out.stages.back().value;
  }
  return out;
}

std::vector<DescentStep> descend_demo(std::span<const double> init_scores,
                                      std::span<const double> ious,
                                      const LossConfig& cfg, int steps,
                                      double lr) {
  if (init_scores.size() != ious.size()) {
    throw std::invalid_argument("descend_demo: length mismatch");
  }
  if (steps < 0) throw std::invalid_argument("descend_demo: negative steps");
  std::vector<double> scores(init_scores.begin(), init_scores.end());
  std::vector<DescentStep> trace;
  trace.reserve(static_cast<std::size_t>(steps) + 1);

  for (int step = 0;; ++step) {
    const LossResult r = correlation_loss(ious, scores, cfg);
    DescentStep entry{r.value, std::numeric_limits<double>::quiet_NaN()};
    try {
      entry.spearman = spearman(ious, scores);
    } catch (const DegenerateInput&) {
    }
    trace.push_back(entry);
    if (step == steps) break;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] -= lr * r.grad_scores[i];
    }
  }
  return trace;
}

}  // namespace corrdet
