// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace zeroswot::testing {

Tensor RandomTensor(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Tensor t(rows, cols);
  for (double& v : t.values()) v = normal(rng);
  return t;
}

Tensor RandomLogProbs(std::size_t n, std::size_t v, std::mt19937_64& rng, double scale) {
  Tensor t = RandomTensor(n, v, rng, scale);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (double x : t.row(i)) total += std::exp(x);
    const double log_total = std::log(total);
    for (double& x : t.row(i)) x -= log_total;
  }
  return t;
}

std::vector<int> ReferenceCollapse(std::span<const int> path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int p : path) {
    if (p != prev && p != blank) out.push_back(p);
    prev = p;
  }
  return out;
}

double BruteForceCtcLoss(const Tensor& log_probs, std::span<const int> labels, int blank) {
  const std::size_t n = log_probs.rows();
  const std::size_t v = log_probs.cols();
  const std::vector<int> target(labels.begin(), labels.end());
  std::vector<int> path(n, 0);
  double prob = 0.0;
  bool any = false;
  for (;;) {
    if (ReferenceCollapse(path, blank) == target) {
      double lp = 0.0;
      for (std::size_t t = 0; t < n; ++t) lp += log_probs(t, static_cast<std::size_t>(path[t]));
      prob += std::exp(lp);
      any = true;
    }
    std::size_t k = 0;
    while (k < n && static_cast<std::size_t>(++path[k]) == v) path[k++] = 0;
    if (k == n) break;
  }
  return any ? -std::log(prob) : std::numeric_limits<double>::infinity();
}

double PermutationOtOptimum(const Tensor& cost) {
  const std::size_t n = cost.rows();
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost(i, sigma[i]);
    best = std::min(best, total / static_cast<double>(n));
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return best;
}

namespace {

double XLogX(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double TwoByTwoObjective(double t, double lambda) {
  const double off = 0.5 - t;
  const double transport = 2.0 * off;
  const double neg_entropy = 2.0 * XLogX(t) + 2.0 * XLogX(off);
  return transport + lambda * neg_entropy;
}

}  // namespace

SymmetricPlanOptimum TwoByTwoOracle(double lambda) {
  double lo = 0.0, hi = 0.5;
  double best_t = 0.25;
  for (int round = 0; round < 12; ++round) {
    constexpr int kGrid = 2001;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kGrid; ++k) {
      const double t = lo + (hi - lo) * k / (kGrid - 1);
      const double f = TwoByTwoObjective(t, lambda);
      if (f < best) {
        best = f;
        best_t = t;
      }
    }
    const double step = (hi - lo) / (kGrid - 1);
    lo = std::max(0.0, best_t - 2.0 * step);
    hi = std::min(0.5, best_t + 2.0 * step);
  }
  return {best_t, TwoByTwoObjective(best_t, lambda)};
}

}  // namespace zeroswot::testing
