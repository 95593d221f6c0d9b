// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/ot.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "zeroswot/error.hpp"
#include "zeroswot/ops.hpp"

namespace zeroswot {
namespace {

// One half-step of log-domain Sinkhorn.
//   rows: f_i = -lambda * LSE_j(log_b + (g_j - C_ij) / lambda)
//   cols: g_j = -lambda * LSE_i(log_a + (f_i - C_ij) / lambda)
// `other` is the opposite potential (1 x m for rows, 1 x n for cols).
Var PotentialUpdate(Var cost, Var other, double log_mass, double lambda, bool rows) {
  const Tensor& c = cost.value();
  const Tensor& o = other.value();
  const std::size_t n = c.rows(), m = c.cols();
  const std::size_t out_len = rows ? n : m;
  const std::size_t inner = rows ? m : n;
  Tensor out(1, out_len);
  std::vector<double> buf(inner);
  for (std::size_t a = 0; a < out_len; ++a) {
    for (std::size_t b = 0; b < inner; ++b) {
      const double cij = rows ? c(a, b) : c(b, a);
      buf[b] = log_mass + (o[b] - cij) / lambda;
    }
    out[a] = -lambda * ops::LogSumExp(buf);
  }
  return cost.graph->Make(
      std::move(out), {cost, other}, [log_mass, lambda, rows](const BackwardContext& ctx) {
        const Tensor& c = *ctx.in[0];
        const Tensor& o = *ctx.in[1];
        const std::size_t n = c.rows(), m = c.cols();
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < m; ++j) {
            const std::size_t a = rows ? i : j;  // output index
            const std::size_t b = rows ? j : i;  // summed index
            const double w =
                std::exp(log_mass + (o[b] - c(i, j) + ctx.out[a]) / lambda);
            const double d = ctx.dout[a] * w;
            if (ctx.din[0]) (*ctx.din[0])(i, j) += d;
            if (ctx.din[1]) (*ctx.din[1])[b] -= d;
          }
        }
      });
}

Tensor LogPlan(const Tensor& c, const Tensor& f, const Tensor& g, double log_a, double log_b,
               double lambda) {
  Tensor l(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = 0; j < c.cols(); ++j) {
      l(i, j) = log_a + log_b + (f[i] + g[j] - c(i, j)) / lambda;
    }
  }
  return l;
}

double MarginalError(const Tensor& log_plan, double a, double b) {
  std::vector<double> rows(log_plan.rows(), 0.0), cols(log_plan.cols(), 0.0);
  for (std::size_t i = 0; i < log_plan.rows(); ++i) {
    for (std::size_t j = 0; j < log_plan.cols(); ++j) {
      const double z = std::exp(log_plan(i, j));
      rows[i] += z;
      cols[j] += z;
    }
  }
  double er = 0.0, ec = 0.0;
  for (double r : rows) er += std::abs(r - a);
  for (double c : cols) ec += std::abs(c - b);
  return std::max(er, ec);
}

// sum Z C + lambda sum Z log Z with log Z built from the potentials.
Var EntropicObjective(Var cost, Var f, Var g, double log_a, double log_b, double lambda,
                      TransportPlan& report) {
  const Tensor l = LogPlan(cost.value(), f.value(), g.value(), log_a, log_b, lambda);
  const Tensor& c = cost.value();
  Tensor plan(c.rows(), c.cols());
  double transport = 0.0, neg_entropy = 0.0;
  for (std::size_t k = 0; k < l.size(); ++k) {
    plan[k] = std::exp(l[k]);
    transport += plan[k] * c[k];
    neg_entropy += plan[k] * l[k];
  }
  report.plan = plan;
  report.transport_cost = transport;
  report.entropy = -neg_entropy;
  report.objective = transport + lambda * neg_entropy;
  return cost.graph->Make(
      Tensor::Scalar(report.objective), {cost, f, g},
      [l, lambda](const BackwardContext& ctx) {
        const Tensor& c = *ctx.in[0];
        const double d = ctx.dout[0];
        for (std::size_t i = 0; i < c.rows(); ++i) {
          for (std::size_t j = 0; j < c.cols(); ++j) {
            const double z = std::exp(l(i, j));
            const double dl = d * z * (c(i, j) + lambda * l(i, j) + lambda);
            if (ctx.din[0]) (*ctx.din[0])(i, j) += d * z - dl / lambda;
            if (ctx.din[1]) (*ctx.din[1])[i] += dl / lambda;
            if (ctx.din[2]) (*ctx.din[2])[j] += dl / lambda;
          }
        }
      });
}

}  // namespace

void ValidateOtConfig(const OtConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw Error(ErrorCode::kConfigInvalid, "ot.lambda must be > 0");
  if (!(cfg.mu >= 0.0)) throw Error(ErrorCode::kConfigInvalid, "ot.mu must be >= 0");
  if (cfg.max_iters < 1) throw Error(ErrorCode::kConfigInvalid, "ot.max_iters must be >= 1");
  if (!(cfg.tol >= 0.0)) throw Error(ErrorCode::kConfigInvalid, "ot.tol must be >= 0");
}

Tensor PositionalCoordinates(std::size_t length) {
  Tensor v(length, 1);
  if (length <= 1) return v;
  for (std::size_t i = 0; i < length; ++i) {
    v[i] = static_cast<double>(i) / static_cast<double>(length - 1);
  }
  return v;
}

Var PositionalAugment(Var h, double mu) {
  Tensor col = PositionalCoordinates(h.rows());
  for (double& x : col.values()) x *= mu;
  const Var parts[] = {h, h.graph->Constant(std::move(col))};
  return ops::ConcatCols(parts);
}

Var CostMatrix(Var a, Var b) { return ops::SquaredDistances(a, b); }

SinkhornResult Sinkhorn(Var cost, const OtConfig& cfg) {
  ValidateOtConfig(cfg);
  const Tensor& c = cost.value();
  if (c.rows() == 0 || c.cols() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "Sinkhorn on empty cost " + c.ShapeString());
  }
  if (!c.AllFinite()) throw Error(ErrorCode::kShapeMismatch, "Sinkhorn cost is not finite");
  Graph& graph = *cost.graph;
  const double a = 1.0 / static_cast<double>(c.rows());
  const double b = 1.0 / static_cast<double>(c.cols());
  const double log_a = std::log(a), log_b = std::log(b);

  SinkhornResult result;
  Var g = graph.Constant(Tensor(1, c.cols()));
  Var f = g;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    f = PotentialUpdate(cost, g, log_b, cfg.lambda, true);
    g = PotentialUpdate(cost, f, log_a, cfg.lambda, false);
    result.plan.iterations = it;
    if (cfg.tol > 0.0) {
      const double err =
          MarginalError(LogPlan(c, f.value(), g.value(), log_a, log_b, cfg.lambda), a, b);
      if (err < cfg.tol) {
        result.plan.converged = true;
        break;
      }
    }
  }
  result.objective = EntropicObjective(cost, f, g, log_a, log_b, cfg.lambda, result.plan);
  result.plan.marginal_error =
      MarginalError(LogPlan(c, f.value(), g.value(), log_a, log_b, cfg.lambda), a, b);
  if (cfg.tol > 0.0) {
    result.plan.converged = result.plan.marginal_error < cfg.tol;
  } else {
    result.plan.converged = result.plan.marginal_error < 1e-6;
  }
  return result;
}

TransportPlan SolveSinkhorn(const Tensor& cost, const OtConfig& cfg) {
  Graph g(false);
  return Sinkhorn(g.Constant(cost), cfg).plan;
}

WassersteinResult WassersteinLoss(Var speech, Var text, const OtConfig& cfg) {
  if (speech.rows() == 0 || text.rows() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "Wasserstein loss on an empty sequence");
  }
  if (speech.cols() != text.cols()) {
    throw Error(ErrorCode::kWidthMismatch, "speech width " + std::to_string(speech.cols()) +
                                               " vs text width " + std::to_string(text.cols()));
  }
  Var s = PositionalAugment(speech, cfg.mu);
  Var x = PositionalAugment(text, cfg.mu);
  SinkhornResult cross = Sinkhorn(CostMatrix(s, x), cfg);
  WassersteinResult out{cross.objective, cross.plan};
  if (cfg.debiased) {
    Var ss = Sinkhorn(CostMatrix(s, s), cfg).objective;
    Var xx = Sinkhorn(CostMatrix(x, x), cfg).objective;
    out.loss = ops::Sub(out.loss, ops::Scale(ops::Add(ss, xx), 0.5));
  }
  return out;
}

}  // namespace zeroswot
