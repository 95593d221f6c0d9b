// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zeroswot/autodiff.hpp"

// Differentiable building blocks. All operate on rank-2 values; a "row
// vector" is 1 x n. Shape violations throw Error(kShapeMismatch).
namespace zeroswot::ops {

inline constexpr double kLayerNormEps = 1e-5;

Var MatMul(Var a, Var b);    // (m x k)(k x n)
Var MatMulNT(Var a, Var b);  // (m x k)(n x k)^T
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double s);
Var AddRowVector(Var a, Var row);  // broadcast 1 x n over m x n
Var Relu(Var a);
Var Gelu(Var a);

Var SoftmaxRows(Var a, bool causal = false);
Var LogSoftmaxRows(Var a);
/// Max-shifted log(sum(exp(a))) over all elements; 1 x 1.
Var LogSumExp(Var a);
Var LayerNormRows(Var x, Var gamma, Var beta, double eps = kLayerNormEps);

Var ConcatRows(std::span<const Var> parts);
Var ConcatCols(std::span<const Var> parts);
Var SliceRows(Var a, std::size_t start, std::size_t count);
Var SliceCols(Var a, std::size_t start, std::size_t count);
Var GatherRows(Var table, std::span<const int> ids);
/// Mean over all rows; 1 x n.
Var MeanRows(Var a);
/// Row g of the output is the mean of input rows groups[g].
Var GroupMeanRows(Var a, const std::vector<std::vector<std::size_t>>& groups);
Var Sum(Var a);

/// C_ij = ||a_i - b_j||^2.
Var SquaredDistances(Var a, Var b);

/// Sum over rows of label-smoothed negative log-likelihood. `log_probs` is
/// m x V (already normalised), targets has m entries.
Var SmoothedNll(Var log_probs, std::span<const int> targets, double smoothing);

// Forward-only helpers shared by several modules.
Tensor SinusoidalPositions(std::size_t length, std::size_t d);
double LogSumExp(std::span<const double> v);

}  // namespace zeroswot::ops
