// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "zeroswot/ctc.hpp"
#include "zeroswot/ops.hpp"

namespace zeroswot {
namespace {

constexpr std::size_t kVocab = 40;

void BM_CtcLoss(benchmark::State& state) {
  const auto frames = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  Tensor logits(frames, kVocab);
  for (double& v : logits.values()) v = n(rng);
  std::vector<int> labels;
  for (std::size_t i = 0; i < frames / 3; ++i) labels.push_back(static_cast<int>(1 + i % (kVocab - 1)));
  for (auto _ : state) {
    Graph g;
    Var x = g.Input(logits);
    bool feasible = true;
    Var loss = CtcLoss(ops::LogSoftmaxRows(x), labels, &feasible);
    g.Backward(loss);
    benchmark::DoNotOptimize(g.grad(x).values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames));
}
BENCHMARK(BM_CtcLoss)->Arg(16)->Arg(64)->Arg(256);

void BM_GreedyDecode(benchmark::State& state) {
  const auto frames = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  Tensor lp(frames, kVocab);
  for (double& v : lp.values()) v = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(GreedyDecode(lp));
}
BENCHMARK(BM_GreedyDecode)->Arg(64)->Arg(256);

}  // namespace
}  // namespace zeroswot
