// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>

#include "zeroswot/autodiff.hpp"

namespace zeroswot {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// AdamW with decoupled weight decay. Moments start at zero and are keyed by
/// parameter name. Frozen parameters are skipped entirely.
class AdamW {
 public:
  explicit AdamW(AdamWConfig config = {}) : config_(config) {}

  void Step(std::span<Parameter* const> params, const GradientSet& grads, double lr);
  long steps() const { return steps_; }

 private:
  struct Moments {
    Tensor m;
    Tensor v;
  };
  AdamWConfig config_;
  std::map<std::string, Moments> state_;
  long steps_ = 0;
};

/// Inverse square-root schedule with linear warmup; step counts from 1.
double InverseSqrtLr(long step, double base_lr, long warmup_steps);

/// L2 norm over every gradient in the set.
double GlobalNorm(const GradientSet& grads, std::span<Parameter* const> params);

}  // namespace zeroswot
