// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "zeroswot/autodiff.hpp"
#include "zeroswot/vocab.hpp"

namespace zeroswot {

/// log softmax(a W + b), one row per acoustic frame.
Var CtcHead(Var a, Var weight, Var bias);

struct CtcLossValue {
  double loss = 0.0;  // -log P(z|p); +inf when infeasible
  bool feasible = true;
};

/// Forward DP over the blank-interleaved labels, in log space. `log_probs` is
/// n x |V|; rows need not be normalised.
CtcLossValue CtcLoss(const Tensor& log_probs, std::span<const int> labels, int blank_id = 0);

/// Differentiable CTC loss. Infeasible targets produce a constant +inf node
/// (no gradient) and set `feasible` to false; they never throw.
Var CtcLoss(Var log_probs, std::span<const int> labels, bool* feasible, int blank_id = 0);

struct GreedyCtcResult {
  std::vector<int> path;       // per-frame argmax, may contain blanks
  std::vector<int> collapsed;  // repeats merged, blanks removed
};

/// Row argmax; ties go to the lowest index.
std::vector<int> ArgmaxRows(const Tensor& scores);
std::vector<int> CollapsePath(std::span<const int> path, int blank_id = 0);
GreedyCtcResult GreedyDecode(const Tensor& log_probs, int blank_id = 0);

}  // namespace zeroswot
