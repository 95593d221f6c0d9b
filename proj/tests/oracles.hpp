// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

// Independent reference computations used as test oracles. None of these
// share code with the library implementations they check.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "zeroswot/tensor.hpp"

namespace zeroswot::testing {

Tensor RandomTensor(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale = 1.0);

/// Rows normalized in log space from random logits.
Tensor RandomLogProbs(std::size_t n, std::size_t v, std::mt19937_64& rng, double scale = 2.0);

/// -log of the summed probability of every frame path in V^n that collapses
/// to `labels`; +inf when none does. Enumerates |V|^n paths.
double BruteForceCtcLoss(const Tensor& log_probs, std::span<const int> labels, int blank = 0);

/// Collapse rule written out independently of the library.
std::vector<int> ReferenceCollapse(std::span<const int> path, int blank = 0);

/// Exact optimum of the uniform-marginal assignment problem on a square cost
/// matrix: min over permutations of (1/n) sum_i C[i, sigma(i)].
double PermutationOtOptimum(const Tensor& cost);

struct SymmetricPlanOptimum {
  double t = 0.0;          // diagonal mass of Z = [[t, .5-t], [.5-t, t]]
  double objective = 0.0;
};

/// Entropic objective of C = [[0,1],[1,0]] minimized over the one free
/// parameter of the 2x2 uniform-marginal plan: dense grid, then repeated
/// local refinement.
SymmetricPlanOptimum TwoByTwoOracle(double lambda);

/// Central finite-difference derivative of f along coordinate i.
template <class F>
double CentralDifference(F&& f, std::vector<double> x, std::size_t i, double eps = 1e-6) {
  const double x0 = x[i];
  x[i] = x0 + eps;
  const double fp = f(x);
  x[i] = x0 - eps;
  const double fm = f(x);
  return (fp - fm) / (2.0 * eps);
}

}  // namespace zeroswot::testing
