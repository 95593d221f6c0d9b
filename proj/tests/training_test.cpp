// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include <stdlib.h>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "toy_env.hpp"
#include "zeroswot/checkpoint.hpp"
#include "zeroswot/error.hpp"
#include "zeroswot/ot.hpp"
#include "zeroswot/training.hpp"

namespace zeroswot {
namespace {

using testing::RandomTensor;
using testing::TempDir;
using testing::ToyEnv;

std::uint64_t Hash(std::vector<Parameter*> params) {
  const std::vector<const Parameter*> view(params.begin(), params.end());
  return HashParameters(view);
}

double MaxAbsGrad(const GradientSet& grads, std::vector<Parameter*> params) {
  double m = 0.0;
  for (const Parameter* p : params) {
    if (const Tensor* t = grads.Find(*p)) {
      for (double v : t->values()) m = std::max(m, std::abs(v));
    }
  }
  return m;
}

struct TapInputs {
  Graph g{false};
  std::map<int, Var> speech, text;
  Var ctc;
};

void FillTaps(TapInputs& in, std::mt19937_64& rng, std::initializer_list<int> layers) {
  for (int l : layers) {
    in.speech[l] = in.g.Constant(RandomTensor(3, 4, rng));
    in.text[l] = in.g.Constant(RandomTensor(5, 4, rng));
  }
  in.ctc = in.g.Constant(Tensor::Scalar(2.75));
}

TEST(TotalLossTest, Endpoints) {
  std::mt19937_64 rng(1);
  TapInputs in;
  FillTaps(in, rng, {2, 3, 4});
  LossWeights w;
  OtConfig ot;
  w.alpha = 0.0;
  EXPECT_EQ(TotalLoss(in.speech, in.text, in.ctc, w, ot).total.value().item(), 2.75);
  w.alpha = 1.0;
  const LossBreakdown b = TotalLoss(in.speech, in.text, in.ctc, w, ot);
  double mean = 0.0;
  for (int l : {2, 3, 4}) {
    mean += WassersteinLoss(in.speech.at(l), in.text.at(l), ot).loss.value().item() / 3.0;
  }
  EXPECT_NEAR(b.total.value().item(), mean, 1e-12);
}

TEST(TotalLossTest, DecomposesIntoWeightedTerms) {
  std::mt19937_64 rng(2);
  for (double alpha : {0.1, 0.5, 0.9}) {
    TapInputs in;
    FillTaps(in, rng, {2, 3, 4});
    LossWeights w;
    w.alpha = alpha;
    const LossBreakdown b = TotalLoss(in.speech, in.text, in.ctc, w, OtConfig{});
    ASSERT_EQ(b.wass.size(), 3u);
    double wass = 0.0;
    for (const auto& [l, v] : b.wass) wass += v;
    EXPECT_EQ(b.ctc, 2.75);
    EXPECT_NEAR(b.total.value().item(), (1.0 - alpha) * b.ctc + alpha * wass / 3.0, 1e-12);
  }
}

TEST(TotalLossTest, TapMismatch) {
  std::mt19937_64 rng(3);
  TapInputs in;
  FillTaps(in, rng, {2, 4});
  try {
    TotalLoss(in.speech, in.text, in.ctc, LossWeights{}, OtConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTapMismatch);
  }
}

TEST(LossWeightsTest, NoAuxWassKeepsFinalLayer) {
  TrainConfig cfg;
  cfg.no_aux_wass = true;
  EXPECT_EQ(EffectiveWeights(cfg, 4).taps, (std::vector<int>{4}));
  cfg.no_aux_wass = false;
  EXPECT_EQ(EffectiveWeights(cfg, 4).taps, (std::vector<int>{2, 3, 4}));
  LossWeights w;
  w.taps = {2, 3};
  EXPECT_THROW(ValidateLossWeights(w, 4), Error);
  w.taps = {4};
  w.alpha = 1.5;
  EXPECT_THROW(ValidateLossWeights(w, 4), Error);
}

TEST(MaskSpeechTest, ZeroProbabilityIsIdentity) {
  std::mt19937_64 rng(4);
  const Tensor x = RandomTensor(30, 8, rng);
  EXPECT_EQ(MaskSpeech(x, MaskConfig{}, 9), x);
}

TEST(MaskSpeechTest, CertainMaskZeroesEverything) {
  std::mt19937_64 rng(5);
  const Tensor x = RandomTensor(12, 8, rng);
  MaskConfig cfg;
  cfg.p_time = 1.0;
  cfg.len_time = 1;
  const Tensor by_time = MaskSpeech(x, cfg, 1);
  for (double v : by_time.values()) EXPECT_EQ(v, 0.0);
  cfg = MaskConfig{};
  cfg.p_chan = 1.0;
  cfg.len_chan = 1;
  const Tensor by_channel = MaskSpeech(x, cfg, 2);
  for (double v : by_channel.values()) EXPECT_EQ(v, 0.0);
}

TEST(MaskSpeechTest, MaskedFractionMatchesProbability) {
  // Span length 1 makes every row an independent Bernoulli(p) trial.
  std::mt19937_64 rng(6);
  const Tensor x = RandomTensor(100, 2, rng, 1.0);
  for (double v : x.values()) ASSERT_NE(v, 0.0);
  MaskConfig cfg;
  cfg.p_time = 0.1;
  cfg.len_time = 1;
  const int trials = 100;
  double masked = 0.0;
  for (int s = 0; s < trials; ++s) {
    const Tensor m = MaskSpeech(x, cfg, static_cast<std::uint64_t>(s));
    for (std::size_t t = 0; t < m.rows(); ++t) masked += m(t, 0) == 0.0;
  }
  const double n = 100.0 * trials;
  const double sigma = std::sqrt(n * 0.1 * 0.9);
  EXPECT_NEAR(masked, n * 0.1, 3.0 * sigma);
}

TEST(MaskSpeechTest, DeterministicPerSeed) {
  std::mt19937_64 rng(7);
  const Tensor x = RandomTensor(40, 8, rng);
  MaskConfig cfg;
  cfg.p_time = 0.05;
  cfg.p_chan = 0.1;
  EXPECT_EQ(MaskSpeech(x, cfg, 3), MaskSpeech(x, cfg, 3));
  EXPECT_NE(MaskSpeech(x, cfg, 3), MaskSpeech(x, cfg, 4));
}

TEST(TextTargetsTest, OfflineMatchesOnline) {
  ToyEnv env;
  TempDir dir("targets");
  const std::size_t n =
      ExtractTextTargets(env.asr, env.mt.text, env.task.subwords, env.model, dir.path());
  EXPECT_EQ(n, env.asr.size());
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir.path())) ++files;
  EXPECT_EQ(files, env.asr.size());

  OnlineTargets online(env.mt.text, env.task.subwords, env.model);
  OfflineTargets offline(dir.path());
  for (const AsrPair& ex : env.asr) {
    const TapSet& a = online.Get(*ex.id, *ex.transcription);
    const TapSet& b = offline.Get(*ex.id, *ex.transcription);
    ASSERT_EQ(a.size(), 2u);
    ASSERT_EQ(b.size(), 2u);
    for (const auto& [l, t] : a) EXPECT_EQ(b.at(l), t);
  }
}

TEST(TextTargetsTest, MissingExample) {
  TempDir dir("empty_targets");
  OfflineTargets offline(dir.path());
  try {
    offline.Get("nope", "ABC");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingExample);
  }
}

TEST(TextTargetsTest, TrainingIsIdenticalWithEitherStore) {
  ToyEnv env;
  env.train.steps = 10;
  TempDir dir("targets_train");
  ExtractTextTargets(env.asr, env.mt.text, env.task.subwords, env.model, dir.path());
  const auto ctx = env.Context();
  const std::span<const AsrPair> train(env.asr.data(), 20), valid(env.asr.data() + 20, 4);

  OnlineTargets online(env.mt.text, env.task.subwords, env.model);
  std::ostringstream m1, m2;
  const auto r1 = TrainSpeechEncoder(train, valid, env.mt.text, online, ctx, &m1);
  OfflineTargets offline(dir.path());
  const auto r2 = TrainSpeechEncoder(train, valid, env.mt.text, offline, ctx, &m2);
  EXPECT_FALSE(m1.str().empty());
  EXPECT_EQ(m1.str(), m2.str());
  EXPECT_EQ(r1.steps_run, 10);
}

TEST(TrainMtTest, LossDecreases) {
  ToyEnv env(40);
  MtTrainConfig cfg;
  cfg.steps = 60;
  cfg.batch_size = 8;
  cfg.warmup = 10;
  cfg.base_lr = 3e-3;
  const auto pairs = MtView(env.corpus);
  const MtTrainResult r = TrainToyMt(pairs, {}, env.task.subwords, env.model, cfg);
  ASSERT_EQ(r.losses.size(), 60u);
  const double first = std::accumulate(r.losses.begin(), r.losses.begin() + 10, 0.0);
  const double last = std::accumulate(r.losses.end() - 10, r.losses.end(), 0.0);
  EXPECT_LT(last, 0.8 * first);
}

TEST(TrainSpeechTest, FrozenParametersNeverMove) {
  ToyEnv env;
  const std::uint64_t before = Hash(Parameters(env.mt));
  OnlineTargets targets(env.mt.text, env.task.subwords, env.model);
  const auto ctx = env.Context();
  const std::span<const AsrPair> train(env.asr.data(), 20), valid(env.asr.data() + 20, 4);
  SpeechTrainResult r = TrainSpeechEncoder(train, valid, env.mt.text, targets, ctx);
  EXPECT_EQ(Hash(Parameters(env.mt)), before);
  for (std::size_t c = 0; c < 16; ++c) {
    EXPECT_EQ(r.model.embedder.eps_lang.value[c], env.mt.text.embedding.value(0, c));
    EXPECT_EQ(r.model.embedder.eps_eos.value[c], env.mt.text.embedding.value(1, c));
  }
  EXPECT_EQ(r.validation.size(), 3u);  // step 0, 3 and 6
}

TEST(TrainSpeechTest, DeterministicGivenSeed) {
  ToyEnv env;
  OnlineTargets targets(env.mt.text, env.task.subwords, env.model);
  const auto ctx = env.Context();
  const std::span<const AsrPair> train(env.asr.data(), 20), valid(env.asr.data() + 20, 4);
  std::ostringstream m1, m2, v1, v2;
  SpeechTrainResult a = TrainSpeechEncoder(train, valid, env.mt.text, targets, ctx, &m1, &v1);
  SpeechTrainResult b = TrainSpeechEncoder(train, valid, env.mt.text, targets, ctx, &m2, &v2);
  EXPECT_EQ(m1.str(), m2.str());
  EXPECT_EQ(v1.str(), v2.str());
  EXPECT_EQ(Hash(Parameters(a.model)), Hash(Parameters(b.model)));
}

// Finds an example whose randomly initialized CTC head still yields chunks,
// so that every branch of the loss is active.
struct GradientAudit {
  ToyEnv env;
  SpeechEncoder enc = InitSpeechEncoder(env.model, env.mt.text, 3);

  GradientSet Run(double alpha) {
    env.train.weights.alpha = alpha;
    const auto ctx = env.Context();
    for (const AsrPair& ex : env.asr) {
      const TapSet targets =
          ComputeTextTaps(env.mt.text, env.task.subwords, *ex.transcription, env.model);
      Graph g;
      const ExampleLoss loss =
          SpeechExampleLoss(g, enc, env.mt.text, ctx, *ex.frames, *ex.transcription, targets);
      if (!loss.feasible || !loss.compressed) continue;
      GradientSet grads;
      g.CollectParamGrads(grads);
      return grads;
    }
    ADD_FAILURE() << "no compressible example";
    return {};
  }
};

TEST(GradientFlowTest, AlphaOneLeavesCtcHeadUntouched) {
  GradientAudit audit;
  const GradientSet grads = audit.Run(1.0);
  EXPECT_EQ(MaxAbsGrad(grads, {&audit.enc.ctc.weight, &audit.enc.ctc.bias}), 0.0);
  EXPECT_GT(MaxAbsGrad(grads, Parameters(audit.enc.subword)), 0.0);
  EXPECT_GT(MaxAbsGrad(grads, {&audit.enc.acoustic.conv_w}), 0.0);
  for (Parameter* p : Parameters(audit.env.mt)) EXPECT_EQ(grads.Find(*p), nullptr) << p->name;
  EXPECT_EQ(grads.Find(audit.enc.embedder.eps_lang), nullptr);
}

TEST(GradientFlowTest, AlphaZeroLeavesSubwordEncoderUntouched) {
  GradientAudit audit;
  const GradientSet grads = audit.Run(0.0);
  EXPECT_GT(MaxAbsGrad(grads, {&audit.enc.ctc.weight, &audit.enc.ctc.bias}), 0.0);
  EXPECT_EQ(MaxAbsGrad(grads, Parameters(audit.enc.subword)), 0.0);
  EXPECT_GT(MaxAbsGrad(grads, {&audit.enc.acoustic.conv_w}), 0.0);
}

TEST(ThreadsFromEnvTest, ParsesAndClamps) {
  ::setenv("ZEROSWOT_THREADS", "3", 1);
  const int n = ThreadsFromEnv(1);
  EXPECT_GE(n, 1);
  EXPECT_LE(n, 3);
  ::setenv("ZEROSWOT_THREADS", "-4", 1);
  EXPECT_EQ(ThreadsFromEnv(1), 1);
  ::setenv("ZEROSWOT_THREADS", "zero", 1);
  EXPECT_THROW(ThreadsFromEnv(1), Error);
  ::unsetenv("ZEROSWOT_THREADS");
  EXPECT_EQ(ThreadsFromEnv(1), 1);
}

}  // namespace
}  // namespace zeroswot
