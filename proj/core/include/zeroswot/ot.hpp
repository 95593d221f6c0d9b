// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "zeroswot/autodiff.hpp"

namespace zeroswot {

struct OtConfig {
  double mu = 10.0;      // positional weight
  double lambda = 1.0;   // entropy weight, > 0
  int max_iters = 200;
  double tol = 1e-6;     // on the L1 marginal error; 0 runs all iterations
  bool debiased = false;
};

void ValidateOtConfig(const OtConfig& cfg);

/// Solution of the entropic transport problem between uniform masses
/// 1/rows and 1/cols.
struct TransportPlan {
  Tensor plan;
  double objective = 0.0;       // transport_cost - lambda * entropy
  double transport_cost = 0.0;  // sum Z_ij C_ij
  double entropy = 0.0;         // -sum Z_ij log Z_ij
  double marginal_error = 0.0;  // max of row and column L1 errors
  int iterations = 0;
  bool converged = false;
};

/// v_i = (i-1)/(len-1), with v = [0] for a single row.
Tensor PositionalCoordinates(std::size_t length);

/// [h ; mu * v], one extra column.
Var PositionalAugment(Var h, double mu);

/// C_ij = ||a_i - b_j||^2; kWidthMismatch on differing widths.
Var CostMatrix(Var a, Var b);

struct SinkhornResult {
  Var objective;
  TransportPlan plan;
};

/// Log-domain Sinkhorn. The returned objective is differentiable with respect
/// to the cost matrix through the executed iterations.
SinkhornResult Sinkhorn(Var cost, const OtConfig& cfg);

/// Forward-only convenience wrapper.
TransportPlan SolveSinkhorn(const Tensor& cost, const OtConfig& cfg);

struct WassersteinResult {
  Var loss;
  TransportPlan plan;  // plan of the cross term
};

/// Augment both sequences, build the cost, solve. With cfg.debiased the loss
/// is OT(s,x) - OT(s,s)/2 - OT(x,x)/2.
WassersteinResult WassersteinLoss(Var speech, Var text, const OtConfig& cfg);

}  // namespace zeroswot
