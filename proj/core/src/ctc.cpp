// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/ctc.hpp"

#include <cmath>
#include <limits>

#include "zeroswot/error.hpp"
#include "zeroswot/ops.hpp"

namespace zeroswot {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double mx = std::max(a, b);
  return mx + std::log1p(std::exp(-std::abs(a - b)));
}

std::vector<int> Interleave(std::span<const int> labels, int blank) {
  std::vector<int> ext(2 * labels.size() + 1, blank);
  for (std::size_t u = 0; u < labels.size(); ++u) ext[2 * u + 1] = labels[u];
  return ext;
}

bool CanSkip(const std::vector<int>& ext, std::size_t s, int blank) {
  return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2];
}

// alpha[t][s], each including the emission at t.
Tensor Forward(const Tensor& lp, const std::vector<int>& ext, int blank) {
  const std::size_t n = lp.rows(), S = ext.size();
  Tensor alpha(n, S, kNegInf);
  alpha(0, 0) = lp(0, static_cast<std::size_t>(ext[0]));
  if (S > 1) alpha(0, 1) = lp(0, static_cast<std::size_t>(ext[1]));
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = LogAdd(acc, alpha(t - 1, s - 1));
      if (CanSkip(ext, s, blank)) acc = LogAdd(acc, alpha(t - 1, s - 2));
      if (acc != kNegInf) acc += lp(t, static_cast<std::size_t>(ext[s]));
      alpha(t, s) = acc;
    }
  }
  return alpha;
}

Tensor Backward(const Tensor& lp, const std::vector<int>& ext, int blank) {
  const std::size_t n = lp.rows(), S = ext.size();
  Tensor beta(n, S, kNegInf);
  beta(n - 1, S - 1) = lp(n - 1, static_cast<std::size_t>(ext[S - 1]));
  if (S > 1) beta(n - 1, S - 2) = lp(n - 1, static_cast<std::size_t>(ext[S - 2]));
  for (std::size_t t = n - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = beta(t + 1, s);
      if (s + 1 < S) acc = LogAdd(acc, beta(t + 1, s + 1));
      if (s + 2 < S && CanSkip(ext, s + 2, blank)) acc = LogAdd(acc, beta(t + 1, s + 2));
      if (acc != kNegInf) acc += lp(t, static_cast<std::size_t>(ext[s]));
      beta(t, s) = acc;
    }
  }
  return beta;
}

double LogLikelihood(const Tensor& alpha) {
  const std::size_t n = alpha.rows(), S = alpha.cols();
  double ll = alpha(n - 1, S - 1);
  if (S > 1) ll = LogAdd(ll, alpha(n - 1, S - 2));
  return ll;
}

void CheckLabels(const Tensor& lp, std::span<const int> labels, int blank) {
  for (int id : labels) {
    if (id == blank || id < 0 || static_cast<std::size_t>(id) >= lp.cols()) {
      throw Error(ErrorCode::kShapeMismatch, "CTC label id out of range or blank");
    }
  }
}

}  // namespace

Var CtcHead(Var a, Var weight, Var bias) {
  return ops::LogSoftmaxRows(ops::AddRowVector(ops::MatMul(a, weight), bias));
}

CtcLossValue CtcLoss(const Tensor& log_probs, std::span<const int> labels, int blank_id) {
  CheckLabels(log_probs, labels, blank_id);
  if (log_probs.rows() == 0) return {std::numeric_limits<double>::infinity(), false};
  const auto ext = Interleave(labels, blank_id);
  const double ll = LogLikelihood(Forward(log_probs, ext, blank_id));
  if (ll == kNegInf) return {std::numeric_limits<double>::infinity(), false};
  return {-ll, true};
}

Var CtcLoss(Var log_probs, std::span<const int> labels, bool* feasible, int blank_id) {
  const Tensor& lp = log_probs.value();
  CheckLabels(lp, labels, blank_id);
  Graph& g = *log_probs.graph;
  if (lp.rows() == 0) {
    if (feasible) *feasible = false;
    return g.Constant(Tensor::Scalar(std::numeric_limits<double>::infinity()));
  }
  auto ext = Interleave(labels, blank_id);
  Tensor alpha = Forward(lp, ext, blank_id);
  const double ll = LogLikelihood(alpha);
  if (ll == kNegInf) {
    if (feasible) *feasible = false;
    return g.Constant(Tensor::Scalar(std::numeric_limits<double>::infinity()));
  }
  if (feasible) *feasible = true;
  return g.Make(Tensor::Scalar(-ll), {log_probs},
                [ext = std::move(ext), alpha = std::move(alpha), ll,
                 blank_id](const BackwardContext& c) {
                  const Tensor& lp = *c.in[0];
                  const Tensor beta = Backward(lp, ext, blank_id);
                  const double g = c.dout[0];
                  for (std::size_t t = 0; t < lp.rows(); ++t) {
                    for (std::size_t s = 0; s < ext.size(); ++s) {
                      const double ab = alpha(t, s) + beta(t, s);
                      if (ab == kNegInf) continue;
                      const auto k = static_cast<std::size_t>(ext[s]);
                      (*c.din[0])(t, k) -= g * std::exp(ab - lp(t, k) - ll);
                    }
                  }
                });
}

std::vector<int> ArgmaxRows(const Tensor& scores) {
  std::vector<int> out(scores.rows());
  for (std::size_t t = 0; t < scores.rows(); ++t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.cols(); ++k) {
      if (scores(t, k) > scores(t, best)) best = k;
    }
    out[t] = static_cast<int>(best);
  }
  return out;
}

std::vector<int> CollapsePath(std::span<const int> path, int blank_id) {
  std::vector<int> out;
  int prev = -1;
  for (int label : path) {
    if (label != prev && label != blank_id) out.push_back(label);
    prev = label;
  }
  return out;
}

GreedyCtcResult GreedyDecode(const Tensor& log_probs, int blank_id) {
  GreedyCtcResult r;
  r.path = ArgmaxRows(log_probs);
  r.collapsed = CollapsePath(r.path, blank_id);
  return r;
}

}  // namespace zeroswot
