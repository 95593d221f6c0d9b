// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "zeroswot/error.hpp"

namespace zeroswot {
namespace {

double RelError(double analytic, double numeric) {
  if (!std::isfinite(analytic) || !std::isfinite(numeric)) {
    throw Error(ErrorCode::kNonFiniteGradient, "non-finite gradient in check");
  }
  return std::abs(analytic - numeric) /
         std::max(kGradScaleFloor, std::abs(analytic) + std::abs(numeric));
}

double EvalInputs(const ScalarFunction& f, const std::vector<Tensor>& inputs) {
  Graph g(false);
  std::vector<Var> vars;
  for (const Tensor& t : inputs) vars.push_back(g.Constant(t));
  return f(g, vars).value().item();
}

double EvalParams(const ParamFunction& f) {
  Graph g(false);
  return f(g).value().item();
}

}  // namespace

GradCheckResult GradCheck(const ScalarFunction& f, std::vector<Tensor> inputs,
                          double eps) {
  std::vector<Tensor> analytic;
  {
    Graph g;
    std::vector<Var> vars;
    for (const Tensor& t : inputs) vars.push_back(g.Input(t));
    Var out = f(g, vars);
    g.Backward(out);
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const Tensor& gr = g.grad(vars[k]);
      analytic.push_back(gr.empty() ? Tensor(inputs[k].shape()) : gr);
    }
  }
  GradCheckResult result;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double orig = inputs[k][i];
      inputs[k][i] = orig + eps;
      const double up = EvalInputs(f, inputs);
      inputs[k][i] = orig - eps;
      const double down = EvalInputs(f, inputs);
      inputs[k][i] = orig;
      const double numeric = (up - down) / (2.0 * eps);
      result.max_rel_error =
          std::max(result.max_rel_error, RelError(analytic[k][i], numeric));
      ++result.elements;
    }
  }
  return result;
}

GradCheckResult GradCheckParams(const ParamFunction& f,
                                std::span<Parameter* const> params, double eps) {
  GradientSet grads;
  {
    Graph g;
    Var out = f(g);
    g.Backward(out);
    g.CollectParamGrads(grads);
  }
  GradCheckResult result;
  for (Parameter* p : params) {
    const Tensor* gr = grads.Find(*p);
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double orig = p->value[i];
      p->value[i] = orig + eps;
      const double up = EvalParams(f);
      p->value[i] = orig - eps;
      const double down = EvalParams(f);
      p->value[i] = orig;
      const double numeric = (up - down) / (2.0 * eps);
      const double an = gr ? (*gr)[i] : 0.0;
      result.max_rel_error = std::max(result.max_rel_error, RelError(an, numeric));
      ++result.elements;
    }
  }
  return result;
}

}  // namespace zeroswot
