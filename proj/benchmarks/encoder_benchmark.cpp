// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <benchmark/benchmark.h>

#include "zeroswot/encoder.hpp"
#include "zeroswot/ops.hpp"

namespace zeroswot {
namespace {

void BM_EncoderForward(benchmark::State& state) {
  const ModelConfig cfg;
  const MtModel mt = InitMtModel(cfg, 1);
  const auto rows = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  Tensor x(rows, static_cast<std::size_t>(cfg.d));
  for (double& v : x.values()) v = n(rng);
  for (auto _ : state) {
    Graph g(false);
    benchmark::DoNotOptimize(
        EncodeWithTaps(g, mt.text.encoder, g.Constant(x), cfg.heads, cfg.taps).final.value().values().data());
  }
}
BENCHMARK(BM_EncoderForward)->Arg(8)->Arg(32)->Arg(128);

void BM_EncoderBackward(benchmark::State& state) {
  const ModelConfig cfg;
  const MtModel mt = InitMtModel(cfg, 1);
  const auto rows = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  Tensor x(rows, static_cast<std::size_t>(cfg.d));
  for (double& v : x.values()) v = n(rng);
  for (auto _ : state) {
    Graph g;
    Var in = g.Input(x);
    Var out = EncodeWithTaps(g, mt.text.encoder, in, cfg.heads, {}).final;
    g.Backward(ops::Sum(out));
    benchmark::DoNotOptimize(g.grad(in).values().data());
  }
}
BENCHMARK(BM_EncoderBackward)->Arg(8)->Arg(32);

}  // namespace
}  // namespace zeroswot
