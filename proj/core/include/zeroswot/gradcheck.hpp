// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "zeroswot/autodiff.hpp"

namespace zeroswot {

/// Builds a scalar on `graph` from graph inputs created by the checker.
using ScalarFunction = std::function<Var(Graph& graph, std::span<const Var> inputs)>;
/// Builds a scalar that reads model parameters directly.
using ParamFunction = std::function<Var(Graph& graph)>;

/// Gradients smaller than this are compared on absolute difference, since
/// central differences carry rounding noise around 1e-10.
inline constexpr double kGradScaleFloor = 1e-6;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t elements = 0;
};

/// Central-difference check of the tape gradient with respect to every element
/// of every input. Error per element is
///   |analytic - numeric| / max(kGradScaleFloor, |analytic| + |numeric|)
/// and the maximum is reported. Throws kNonFiniteGradient on NaN/Inf.
GradCheckResult GradCheck(const ScalarFunction& f, std::vector<Tensor> inputs,
                          double eps = 1e-5);

/// Same check, perturbing parameter values in place (restored afterwards).
GradCheckResult GradCheckParams(const ParamFunction& f,
                                std::span<Parameter* const> params, double eps = 1e-5);

}  // namespace zeroswot
