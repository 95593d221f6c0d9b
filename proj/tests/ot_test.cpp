// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "zeroswot/error.hpp"
#include "zeroswot/gradcheck.hpp"
#include "zeroswot/ops.hpp"
#include "zeroswot/ot.hpp"

namespace zeroswot {
namespace {

using testing::RandomTensor;

void ExpectUniformMarginals(const Tensor& plan, double tol) {
  const double n = static_cast<double>(plan.rows()), m = static_cast<double>(plan.cols());
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < plan.cols(); ++j) {
      EXPECT_GE(plan(i, j), 0.0);
      row += plan(i, j);
    }
    EXPECT_NEAR(row, 1.0 / n, tol);
  }
  for (std::size_t j = 0; j < plan.cols(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < plan.rows(); ++i) col += plan(i, j);
    EXPECT_NEAR(col, 1.0 / m, tol);
  }
}

TEST(PositionalAugmentTest, AppendsScaledPositions) {
  Graph g(false);
  const Tensor& h = PositionalAugment(g.Constant(Tensor(3, 2, 1.0)), 10.0).value();
  ASSERT_EQ(h.cols(), 3u);
  EXPECT_EQ(h(0, 2), 0.0);
  EXPECT_EQ(h(1, 2), 5.0);
  EXPECT_EQ(h(2, 2), 10.0);
  EXPECT_EQ(h(1, 0), 1.0);
  EXPECT_EQ(PositionalCoordinates(3), Tensor::FromValues(3, 1, {0.0, 0.5, 1.0}));
  EXPECT_EQ(PositionalCoordinates(1), Tensor::FromValues(1, 1, {0.0}));
  EXPECT_EQ(PositionalAugment(g.Constant(Tensor(1, 2, 4.0)), 10.0).value()(0, 2), 0.0);
}

TEST(CostMatrixTest, SquaredEuclidean) {
  Graph g(false);
  EXPECT_EQ(CostMatrix(g.Constant(Tensor::Scalar(0.0)), g.Constant(Tensor::Scalar(3.0))).value().item(), 9.0);
  const Tensor v = Tensor::FromValues(1, 2, {0.3, -1.2});
  EXPECT_EQ(CostMatrix(g.Constant(v), g.Constant(v)).value().item(), 0.0);
  try {
    CostMatrix(g.Constant(Tensor(2, 3)), g.Constant(Tensor(2, 4)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWidthMismatch);
  }
}

TEST(CostMatrixTest, SymmetricUnderSwap) {
  std::mt19937_64 rng(1);
  Graph g(false);
  const Tensor a = RandomTensor(3, 4, rng), b = RandomTensor(5, 4, rng);
  const Tensor& ab = CostMatrix(g.Constant(a), g.Constant(b)).value();
  const Tensor& ba = CostMatrix(g.Constant(b), g.Constant(a)).value();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_NEAR(ab(i, j), ba(j, i), 1e-12);
      EXPECT_GE(ab(i, j), 0.0);
    }
  }
}

TEST(CostMatrixTest, ZeroMuIsUnaugmented) {
  std::mt19937_64 rng(2);
  Graph g(false);
  const Tensor a = RandomTensor(3, 4, rng), b = RandomTensor(2, 4, rng);
  const Tensor& plain = CostMatrix(g.Constant(a), g.Constant(b)).value();
  const Tensor& aug = CostMatrix(PositionalAugment(g.Constant(a), 0.0),
                                 PositionalAugment(g.Constant(b), 0.0))
                          .value();
  for (std::size_t i = 0; i < plain.size(); ++i) EXPECT_EQ(plain[i], aug[i]);
}

TEST(SinkhornTest, OneByOne) {
  OtConfig cfg;
  const TransportPlan p = SolveSinkhorn(Tensor::Scalar(2.5), cfg);
  EXPECT_NEAR(p.plan.item(), 1.0, 1e-15);
  EXPECT_NEAR(p.entropy, 0.0, 1e-15);
  EXPECT_NEAR(p.objective, 2.5, 1e-12);
  EXPECT_TRUE(p.converged);
}

TEST(SinkhornTest, TwoByTwoMatchesOneDimensionalOracle) {
  OtConfig cfg;
  cfg.lambda = 0.1;
  cfg.tol = 1e-13;
  cfg.max_iters = 10000;
  const TransportPlan p = SolveSinkhorn(Tensor::FromValues(2, 2, {0.0, 1.0, 1.0, 0.0}), cfg);
  const auto oracle = testing::TwoByTwoOracle(0.1);
  ASSERT_TRUE(p.converged);
  EXPECT_NEAR(p.objective, oracle.objective, 1e-6);
  EXPECT_NEAR(p.plan(0, 0), oracle.t, 1e-6);
  EXPECT_NEAR(p.plan(1, 1), oracle.t, 1e-6);
  EXPECT_NEAR(p.plan(0, 1), 0.5 - oracle.t, 1e-6);
  ExpectUniformMarginals(p.plan, 1e-6);
}

TEST(SinkhornTest, ConvergedPlansHaveUniformMarginals) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> len(1, 7);
  OtConfig cfg;
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor c = RandomTensor(static_cast<std::size_t>(len(rng)), static_cast<std::size_t>(len(rng)), rng);
    Tensor cost = c;
    for (double& v : cost.values()) v = v * v;
    const TransportPlan p = SolveSinkhorn(cost, cfg);
    ASSERT_TRUE(p.converged);
    EXPECT_LE(p.marginal_error, 1e-6);
    ExpectUniformMarginals(p.plan, 1e-6);
    EXPECT_GE(p.entropy, 0.0);
    EXPECT_NEAR(p.objective, p.transport_cost - cfg.lambda * p.entropy, 1e-12);
  }
}

TEST(SinkhornTest, SmallLambdaApproachesAssignmentOptimum) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> len(1, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  OtConfig cfg;
  cfg.lambda = 1e-3;
  // Plain Sinkhorn contracts very slowly at this lambda, so the marginals
  // are only checked loosely; the cost itself must still be near optimal.
  cfg.max_iters = 20000;
  cfg.tol = 1e-9;
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(len(rng));
    Tensor cost(n, n);
    for (double& v : cost.values()) v = unit(rng);
    const TransportPlan p = SolveSinkhorn(cost, cfg);
    const double exact = testing::PermutationOtOptimum(cost);
    EXPECT_LE(p.marginal_error, 1e-3);
    EXPECT_LE(std::abs(p.transport_cost - exact), 0.02 * std::abs(exact) + 1e-12)
        << "n=" << n << " trial " << trial;
  }
}

TEST(SinkhornTest, FixedIterationsWhenTolIsZero) {
  OtConfig cfg;
  cfg.tol = 0.0;
  cfg.max_iters = 17;
  std::mt19937_64 rng(5);
  const TransportPlan p = SolveSinkhorn(RandomTensor(3, 4, rng), cfg);
  EXPECT_EQ(p.iterations, 17);
}

TEST(SinkhornTest, LargerMuConcentratesDiagonal) {
  // Identical vectors at every position: only the positional term breaks ties.
  OtConfig cfg;
  cfg.lambda = 0.05;
  cfg.tol = 1e-10;
  cfg.max_iters = 20000;
  std::mt19937_64 rng(6);
  for (std::size_t n : {3u, 4u, 5u}) {
    const Tensor row = RandomTensor(1, 4, rng);
    Tensor h(n, 4);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < 4; ++j) h(i, j) = row[j];
    }
    auto diagonal = [&](double mu) {
      OtConfig c = cfg;
      c.mu = mu;
      Graph g(false);
      const WassersteinResult r = WassersteinLoss(g.Constant(h), g.Constant(h), c);
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d += r.plan.plan(i, i);
      return d;
    };
    const double d0 = diagonal(0.0), d10 = diagonal(10.0);
    EXPECT_NEAR(d0, 1.0 / static_cast<double>(n), 1e-9);
    EXPECT_GT(d10, d0);
    EXPECT_GT(d10, 0.99);
  }
}

TEST(WassersteinTest, DebiasedVanishesOnIdenticalInputs) {
  std::mt19937_64 rng(7);
  OtConfig cfg;
  cfg.debiased = true;
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor h = RandomTensor(4, 3, rng);
    Graph g(false);
    EXPECT_NEAR(WassersteinLoss(g.Constant(h), g.Constant(h), cfg).loss.value().item(), 0.0, 1e-8);
  }
}

TEST(WassersteinTest, PlanMatchesStandaloneSolver) {
  std::mt19937_64 rng(8);
  const Tensor a = RandomTensor(3, 2, rng), b = RandomTensor(4, 2, rng);
  OtConfig cfg;
  Graph g(false);
  const WassersteinResult r = WassersteinLoss(g.Constant(a), g.Constant(b), cfg);
  const Tensor& cost =
      CostMatrix(PositionalAugment(g.Constant(a), cfg.mu), PositionalAugment(g.Constant(b), cfg.mu)).value();
  const TransportPlan p = SolveSinkhorn(cost, cfg);
  EXPECT_NEAR(r.loss.value().item(), p.objective, 1e-10);
  EXPECT_EQ(r.plan.iterations, p.iterations);
}

TEST(WassersteinTest, GradCheckDefaults) {
  OtConfig cfg;  // mu = 10, lambda = 1
  cfg.tol = 0.0;
  cfg.max_iters = 60;
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    const auto r = GradCheck(
        [&cfg](Graph&, std::span<const Var> in) { return WassersteinLoss(in[0], in[1], cfg).loss; },
        {RandomTensor(3, 2, rng), RandomTensor(2, 2, rng)});
    worst = std::max(worst, r.max_rel_error);
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(WassersteinTest, GradCheckDebiased) {
  OtConfig cfg;
  cfg.tol = 0.0;
  cfg.max_iters = 40;
  cfg.debiased = true;
  std::mt19937_64 rng(10);
  for (int seed = 0; seed < 5; ++seed) {
    const auto r = GradCheck(
        [&cfg](Graph&, std::span<const Var> in) { return WassersteinLoss(in[0], in[1], cfg).loss; },
        {RandomTensor(2, 3, rng), RandomTensor(3, 3, rng)});
    EXPECT_LE(r.max_rel_error, 1e-4);
  }
}

TEST(OtConfigTest, Validation) {
  OtConfig cfg;
  EXPECT_NO_THROW(ValidateOtConfig(cfg));
  cfg.lambda = 0.0;
  EXPECT_THROW(ValidateOtConfig(cfg), Error);
  cfg.lambda = 1.0;
  cfg.mu = -1.0;
  EXPECT_THROW(ValidateOtConfig(cfg), Error);
}

}  // namespace
}  // namespace zeroswot
