// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/optim.hpp"

#include <algorithm>
#include <cmath>

namespace zeroswot {

void AdamW::Step(std::span<Parameter* const> params, const GradientSet& grads,
                 double lr) {
  ++steps_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  for (Parameter* p : params) {
    if (p->frozen) continue;
    const Tensor* g = grads.Find(*p);
    auto [it, inserted] = state_.try_emplace(p->name);
    Moments& st = it->second;
    if (inserted) {
      st.m = Tensor(p->value.shape());
      st.v = Tensor(p->value.shape());
    }
    Tensor& w = p->value;
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] *= 1.0 - lr * config_.weight_decay;
      const double gi = g ? (*g)[i] : 0.0;
      st.m[i] = config_.beta1 * st.m[i] + (1.0 - config_.beta1) * gi;
      st.v[i] = config_.beta2 * st.v[i] + (1.0 - config_.beta2) * gi * gi;
      const double mhat = st.m[i] / bc1;
      const double vhat = st.v[i] / bc2;
      w[i] -= lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
  }
}

double InverseSqrtLr(long step, double base_lr, long warmup_steps) {
  step = std::max(step, 1L);
  if (warmup_steps <= 0) return base_lr / std::sqrt(static_cast<double>(step));
  if (step <= warmup_steps) {
    return base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
  }
  return base_lr * std::sqrt(static_cast<double>(warmup_steps) / static_cast<double>(step));
}

double GlobalNorm(const GradientSet& grads, std::span<Parameter* const> params) {
  double s = 0.0;
  for (const Parameter* p : params) {
    if (const Tensor* g = grads.Find(*p)) {
      for (double v : g->values()) s += v * v;
    }
  }
  return std::sqrt(s);
}

}  // namespace zeroswot
