// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <benchmark/benchmark.h>

#include "zeroswot/ot.hpp"

namespace zeroswot {
namespace {

Tensor RandomTensor(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Tensor t(rows, cols);
  for (double& v : t.values()) v = n(rng);
  return t;
}

void BM_SolveSinkhorn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor cost = RandomTensor(n, n, 1);
  OtConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveSinkhorn(cost, cfg));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveSinkhorn)->RangeMultiplier(2)->Range(4, 64)->Complexity();

// Forward plus unrolled backward, as used by the training loss.
void BM_WassersteinLossBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor speech = RandomTensor(n + 2, 32, 2);
  const Tensor text = RandomTensor(n, 32, 3);
  OtConfig cfg;
  cfg.max_iters = 50;
  for (auto _ : state) {
    Graph g;
    Var s = g.Input(speech);
    Var loss = WassersteinLoss(s, g.Constant(text), cfg).loss;
    g.Backward(loss);
    benchmark::DoNotOptimize(g.grad(s).values().data());
  }
}
BENCHMARK(BM_WassersteinLossBackward)->Arg(8)->Arg(16)->Arg(32);

}  // namespace
}  // namespace zeroswot
