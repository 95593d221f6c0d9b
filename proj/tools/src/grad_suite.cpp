// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "grad_suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "zeroswot/compression.hpp"
#include "zeroswot/ctc.hpp"
#include "zeroswot/data.hpp"
#include "zeroswot/encoder.hpp"
#include "zeroswot/gradcheck.hpp"
#include "zeroswot/ops.hpp"
#include "zeroswot/ot.hpp"
#include "zeroswot/training.hpp"

namespace zeroswot::cli {
namespace {

using Rng = std::mt19937_64;

Tensor Random(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Tensor t(rows, cols);
  for (double& v : t.values()) v = n(rng);
  return t;
}

std::size_t Uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Contracts an output with fixed random weights so every element matters.
Var Project(Var out, const Tensor& weights) {
  Graph& g = *out.graph;
  return ops::Sum(ops::Mul(out, g.Constant(weights)));
}

ModelConfig TinyModel() {
  ModelConfig cfg;
  cfg.d = 8;
  cfg.heads = 2;
  cfg.ff_dim = 12;
  cfg.acoustic_layers = 1;
  cfg.shared_layers = 2;
  cfg.subword_layers = 1;
  cfg.decoder_layers = 1;
  cfg.taps = {1, 2};
  cfg.feature_dim = 3;
  cfg.downsample = 2;
  cfg.letter_vocab = 6;
  cfg.subword_vocab = 7;
  return cfg;
}

using Check = std::function<GradCheckResult(Rng&)>;

// Attention scores are shift-invariant per query, so key bias gradients are
// exactly zero and a relative error would only measure rounding noise. They
// are checked against zero; every other parameter goes through finite differences.
GradCheckResult CheckWithKeyBiases(const ParamFunction& f, std::vector<Parameter*> all) {
  std::vector<Parameter*> params, key_biases;
  for (Parameter* p : all) (p->name.ends_with(".bk") ? key_biases : params).push_back(p);
  GradCheckResult result = GradCheckParams(f, params);
  GradientSet grads;
  {
    Graph g;
    g.Backward(f(g));
    g.CollectParamGrads(grads);
  }
  for (Parameter* p : key_biases) {
    if (const Tensor* gr = grads.Find(*p)) {
      for (double v : gr->values()) {
        if (std::abs(v) > 1e-12) result.max_rel_error = std::max(result.max_rel_error, 1.0);
      }
    }
    result.elements += p->value.size();
  }
  return result;
}

GradCheckResult CtcCheck(Rng& rng) {
  const std::size_t vocab = Uniform(rng, 2, 4);
  const std::size_t len = Uniform(rng, 1, 3);
  std::vector<int> labels;
  for (std::size_t i = 0; i < len; ++i) {
    labels.push_back(static_cast<int>(Uniform(rng, 1, vocab - 1)));
  }
  std::size_t need = labels.size();
  for (std::size_t i = 1; i < labels.size(); ++i) need += labels[i] == labels[i - 1];
  const std::size_t frames = Uniform(rng, std::max<std::size_t>(need, 2), 6);
  return GradCheck(
      [labels](Graph&, std::span<const Var> in) {
        bool feasible = true;
        return CtcLoss(ops::LogSoftmaxRows(in[0]), labels, &feasible);
      },
      {Random(rng, frames, vocab)});
}

GradCheckResult WassersteinCheck(Rng& rng, bool debiased) {
  OtConfig cfg;  // mu = 10, lambda = 1
  cfg.tol = 0.0;
  cfg.debiased = debiased;
  const std::size_t m = Uniform(rng, 2, 4);
  return GradCheck(
      [cfg](Graph&, std::span<const Var> in) { return WassersteinLoss(in[0], in[1], cfg).loss; },
      {Random(rng, 3, 2), Random(rng, m, 2)});
}

GradCheckResult SubwordEncodeCheck(Rng& rng) {
  const ModelConfig cfg = TinyModel();
  MtModel mt = InitMtModel(cfg, rng());
  SpeechEncoder enc = InitSpeechEncoder(cfg, mt.text, rng());
  const std::size_t n = Uniform(rng, 1, 4);
  const Tensor w = Random(rng, 1, static_cast<std::size_t>(cfg.d));
  GradCheckResult input = GradCheck(
      [&](Graph& g, std::span<const Var> in) {
        return Project(SubwordEncode(g, enc.subword, in[0], cfg.heads), w);
      },
      {Random(rng, n, static_cast<std::size_t>(cfg.d))});
  const Tensor chunk = Random(rng, n, static_cast<std::size_t>(cfg.d));
  GradCheckResult param = CheckWithKeyBiases(
      [&](Graph& g) {
        return Project(SubwordEncode(g, enc.subword, g.Constant(chunk), cfg.heads), w);
      },
      Parameters(enc.subword));
  return {std::max(input.max_rel_error, param.max_rel_error), input.elements + param.elements};
}

GradCheckResult AdaptSubwordCheck(Rng& rng) {
  const ModelConfig cfg = TinyModel();
  MtModel mt = InitMtModel(cfg, rng());
  SpeechEncoder enc = InitSpeechEncoder(cfg, mt.text, rng());
  // Greedy path with two characters, a separator and a third character.
  const std::vector<int> path = {0, 3, 3, 4, 2, 0, 5, 5};
  Tensor lp = Random(rng, path.size(), 6, 0.1);
  for (std::size_t t = 0; t < path.size(); ++t) lp(t, static_cast<std::size_t>(path[t])) += 5.0;
  AdapterOptions options;
  options.heads = cfg.heads;
  const Tensor w = Random(rng, 2, static_cast<std::size_t>(cfg.d));
  return GradCheck(
      [&](Graph& g, std::span<const Var> in) {
        return Project(Adapt(g, in[0], lp, AdapterMode::kSubword, enc.subword, options).output, w);
      },
      {Random(rng, path.size(), static_cast<std::size_t>(cfg.d))});
}

GradCheckResult TotalLossCheck(Rng& rng) {
  LossWeights w;
  w.alpha = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
  w.taps = {2, 3, 4};
  OtConfig ot;
  ot.tol = 0.0;
  ot.max_iters = 50;
  const std::size_t n = Uniform(rng, 2, 4), m = Uniform(rng, 2, 4), d = 3;
  std::vector<Tensor> inputs = {Tensor::Scalar(std::abs(Random(rng, 1, 1)[0]) + 1.0)};
  std::vector<Tensor> text;
  for (std::size_t k = 0; k < w.taps.size(); ++k) {
    inputs.push_back(Random(rng, n, d));
    text.push_back(Random(rng, m, d));
  }
  return GradCheck(
      [&](Graph& g, std::span<const Var> in) {
        std::map<int, Var> s, x;
        for (std::size_t k = 0; k < w.taps.size(); ++k) {
          s[w.taps[k]] = in[k + 1];
          x[w.taps[k]] = g.Constant(text[k]);
        }
        return TotalLoss(s, x, in[0], w, ot).total;
      },
      inputs);
}

GradCheckResult ProjectedCheck(Rng& rng, std::vector<Tensor> inputs, std::size_t out_rows,
                               std::size_t out_cols,
                               std::function<Var(std::span<const Var>)> op) {
  const Tensor w = Random(rng, out_rows, out_cols);
  return GradCheck([&](Graph&, std::span<const Var> in) { return Project(op(in), w); },
                   std::move(inputs));
}

std::vector<std::pair<std::string, Check>> LossChecks() {
  return {
      {"ctc_loss", CtcCheck},
      {"wasserstein_loss", [](Rng& r) { return WassersteinCheck(r, false); }},
      {"subword_encode", SubwordEncodeCheck},
      {"total_loss", TotalLossCheck},
  };
}

std::vector<std::pair<std::string, Check>> OpChecks() {
  std::vector<std::pair<std::string, Check>> c;
  c.emplace_back("matmul", [](Rng& r) {
    const std::size_t m = Uniform(r, 1, 4), k = Uniform(r, 1, 4), n = Uniform(r, 1, 4);
    return ProjectedCheck(r, {Random(r, m, k), Random(r, k, n)}, m, n,
                          [](auto in) { return ops::MatMul(in[0], in[1]); });
  });
  c.emplace_back("matmul_nt", [](Rng& r) {
    const std::size_t m = Uniform(r, 1, 4), k = Uniform(r, 1, 4), n = Uniform(r, 1, 4);
    return ProjectedCheck(r, {Random(r, m, k), Random(r, n, k)}, m, n,
                          [](auto in) { return ops::MatMulNT(in[0], in[1]); });
  });
  c.emplace_back("add_row_vector", [](Rng& r) {
    const std::size_t m = Uniform(r, 1, 4), n = Uniform(r, 1, 4);
    return ProjectedCheck(r, {Random(r, m, n), Random(r, 1, n)}, m, n,
                          [](auto in) { return ops::AddRowVector(in[0], in[1]); });
  });
  c.emplace_back("gelu", [](Rng& r) {
    const std::size_t m = Uniform(r, 1, 4), n = Uniform(r, 1, 4);
    return ProjectedCheck(r, {Random(r, m, n)}, m, n, [](auto in) { return ops::Gelu(in[0]); });
  });
  c.emplace_back("softmax_causal", [](Rng& r) {
    const std::size_t n = Uniform(r, 1, 5);
    return ProjectedCheck(r, {Random(r, n, n)}, n, n,
                          [](auto in) { return ops::SoftmaxRows(in[0], true); });
  });
  c.emplace_back("log_softmax", [](Rng& r) {
    const std::size_t m = Uniform(r, 1, 4), n = Uniform(r, 2, 5);
    return ProjectedCheck(r, {Random(r, m, n)}, m, n,
                          [](auto in) { return ops::LogSoftmaxRows(in[0]); });
  });
  c.emplace_back("layer_norm", [](Rng& r) {
    const std::size_t m = Uniform(r, 1, 4), n = Uniform(r, 2, 6);
    return ProjectedCheck(r, {Random(r, m, n), Random(r, 1, n), Random(r, 1, n)}, m, n,
                          [](auto in) { return ops::LayerNormRows(in[0], in[1], in[2]); });
  });
  c.emplace_back("group_mean_rows", [](Rng& r) {
    const std::size_t n = Uniform(r, 3, 6);
    std::vector<std::vector<std::size_t>> groups = {{0}, {1, 2}};
    for (std::size_t k = 3; k < n; ++k) groups.back().push_back(k);
    return ProjectedCheck(r, {Random(r, n, 3)}, groups.size(), 3,
                          [groups](auto in) { return ops::GroupMeanRows(in[0], groups); });
  });
  c.emplace_back("squared_distances", [](Rng& r) {
    const std::size_t n = Uniform(r, 1, 4), m = Uniform(r, 1, 4);
    return ProjectedCheck(r, {Random(r, n, 3), Random(r, m, 3)}, n, m,
                          [](auto in) { return ops::SquaredDistances(in[0], in[1]); });
  });
  c.emplace_back("smoothed_nll", [](Rng& r) {
    const std::size_t m = Uniform(r, 1, 4), v = Uniform(r, 2, 5);
    std::vector<int> targets;
    for (std::size_t i = 0; i < m; ++i) targets.push_back(static_cast<int>(Uniform(r, 0, v - 1)));
    return GradCheck(
        [targets](Graph&, std::span<const Var> in) {
          return ops::SmoothedNll(ops::LogSoftmaxRows(in[0]), targets, 0.1);
        },
        {Random(r, m, v)});
  });
  c.emplace_back("encoder_stack", [](Rng& r) {
    const ModelConfig cfg = TinyModel();
    MtModel mt = InitMtModel(cfg, r());
    const Tensor x = Random(r, 3, static_cast<std::size_t>(cfg.d));
    const Tensor w = Random(r, 3, static_cast<std::size_t>(cfg.d));
    return CheckWithKeyBiases(
        [&](Graph& g) {
          return Project(EncodeWithTaps(g, mt.text.encoder, g.Constant(x), cfg.heads, {}).final, w);
        },
        Parameters(mt.text));
  });
  c.emplace_back("decoder", [](Rng& r) {
    const ModelConfig cfg = TinyModel();
    MtModel mt = InitMtModel(cfg, r());
    const Tensor enc = Random(r, 3, static_cast<std::size_t>(cfg.d));
    const std::vector<int> prefix = {0, 3, 5};
    const std::vector<int> targets = {3, 5, 1};
    return CheckWithKeyBiases(
        [&](Graph& g) {
          Var logits = DecoderForward(g, mt.decoder, mt.text, prefix, g.Constant(enc), cfg.heads);
          return ops::SmoothedNll(ops::LogSoftmaxRows(logits), targets, 0.1);
        },
        Parameters(mt.decoder));
  });
  c.emplace_back("acoustic_encoder", [](Rng& r) {
    const ModelConfig cfg = TinyModel();
    MtModel mt = InitMtModel(cfg, r());
    SpeechEncoder enc = InitSpeechEncoder(cfg, mt.text, r());
    const Tensor frames = Random(r, 5, static_cast<std::size_t>(cfg.feature_dim));
    const Tensor w = Random(r, 3, static_cast<std::size_t>(cfg.d));
    std::vector<Parameter*> params = {&enc.acoustic.conv_w, &enc.acoustic.conv_b,
                                      &enc.acoustic.proj_w, &enc.acoustic.proj_b};
    return GradCheckParams(
        [&](Graph& g) { return Project(AcousticEncode(g, enc.acoustic, frames, cfg), w); }, params);
  });
  c.emplace_back("speech_embed", [](Rng& r) {
    const ModelConfig cfg = TinyModel();
    MtModel mt = InitMtModel(cfg, r());
    SpeechEncoder enc = InitSpeechEncoder(cfg, mt.text, r());
    const std::size_t n = Uniform(r, 1, 3);
    const auto d = static_cast<std::size_t>(cfg.d);
    return ProjectedCheck(r, {Random(r, n, d)}, n + 2, d, [&](auto in) {
      return SpeechEmbed(*in[0].graph, enc.embedder, in[0]);
    });
  });
  c.emplace_back("adapt_subword", AdaptSubwordCheck);
  c.emplace_back("wasserstein_debiased", [](Rng& r) { return WassersteinCheck(r, true); });
  return c;
}

std::vector<GradCheckRow> RunChecks(const std::vector<std::pair<std::string, Check>>& checks,
                                    std::uint64_t seed, int seeds) {
  std::vector<GradCheckRow> rows;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    GradCheckRow row{checks[k].first, 0.0, 0, seeds};
    for (int s = 0; s < seeds; ++s) {
      Rng rng(MixSeed(seed, k * 1000 + static_cast<std::uint64_t>(s)));
      const GradCheckResult r = checks[k].second(rng);
      row.max_rel_error = std::max(row.max_rel_error, r.max_rel_error);
      row.elements += r.elements;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::vector<GradCheckRow> RunLossGradChecks(std::uint64_t seed, int seeds) {
  return RunChecks(LossChecks(), seed, seeds);
}

std::vector<GradCheckRow> RunGradCheckSuite(std::uint64_t seed, int seeds) {
  auto checks = LossChecks();
  for (auto& c : OpChecks()) checks.push_back(std::move(c));
  return RunChecks(checks, seed, seeds);
}

}  // namespace zeroswot::cli
