// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "zeroswot/checkpoint.hpp"
#include "zeroswot/encoder.hpp"
#include "zeroswot/error.hpp"
#include "zeroswot/ops.hpp"

namespace zeroswot {
namespace {

using testing::RandomTensor;

std::uint64_t Hash(MtModel& m) {
  const auto params = Parameters(m);
  const std::vector<const Parameter*> view(params.begin(), params.end());
  return HashParameters(view);
}

ModelConfig Cfg() {
  ModelConfig cfg;
  cfg.letter_vocab = 8;
  cfg.subword_vocab = 12;
  return cfg;
}

TEST(ModelConfigTest, Validation) {
  EXPECT_NO_THROW(ValidateModelConfig(Cfg()));
  auto expect_invalid = [](ModelConfig c) {
    try {
      ValidateModelConfig(c);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfigInvalid);
    }
  };
  ModelConfig c = Cfg();
  c.heads = 5;
  expect_invalid(c);
  c = Cfg();
  c.taps = {2, 3};
  expect_invalid(c);
  c = Cfg();
  c.taps = {0, 4};
  expect_invalid(c);
  c = Cfg();
  c.downsample = 0;
  expect_invalid(c);
}

TEST(EmbedTextTest, ZeroEmbeddingGivesPositions) {
  MtModel mt = InitMtModel(Cfg(), 1);
  mt.text.embedding.value.Fill(0.0);
  Graph g(false);
  const int ids[] = {0, 5, 7, 1};
  const Tensor& e = EmbedText(g, mt.text, ids).value();
  EXPECT_EQ(e, ops::SinusoidalPositions(4, 32));
}

TEST(EmbedTextTest, ScalesBySqrtWidth) {
  for (int d : {8, 32}) {
    ModelConfig cfg = Cfg();
    cfg.d = d;
    cfg.heads = 4;
    MtModel mt = InitMtModel(cfg, 2);
    Graph g(false);
    const int ids[] = {0, 3, 1};
    const Tensor& e = EmbedText(g, mt.text, ids).value();
    const Tensor pos = ops::SinusoidalPositions(3, static_cast<std::size_t>(d));
    ASSERT_EQ(e.rows(), 3u);
    for (std::size_t c = 0; c < static_cast<std::size_t>(d); ++c) {
      EXPECT_NEAR(e(1, c), std::sqrt(d) * mt.text.embedding.value(3, c) + pos(1, c), 1e-12);
    }
  }
}

TEST(EmbedTextTest, UnknownTokenId) {
  MtModel mt = InitMtModel(Cfg(), 1);
  Graph g(false);
  const int ids[] = {0, 12, 1};
  try {
    EmbedText(g, mt.text, ids);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownTokenId);
  }
}

TEST(EncodeWithTapsTest, FinalTapAndCounts) {
  const ModelConfig cfg = Cfg();
  MtModel mt = InitMtModel(cfg, 3);
  std::mt19937_64 rng(3);
  const Tensor e = RandomTensor(5, 32, rng);
  Graph g(false);
  const EncoderOutput out = EncodeWithTaps(g, mt.text.encoder, g.Constant(e), cfg.heads, cfg.taps);
  ASSERT_EQ(out.taps.size(), cfg.taps.size());
  EXPECT_EQ(out.taps.at(4).value(), out.final.value());
  for (const auto& [l, v] : out.taps) {
    EXPECT_EQ(v.rows(), 5u);
    EXPECT_EQ(v.cols(), 32u);
  }
  // Intermediate taps are layernormed: zero mean per row before the affine
  // parameters move away from their identity initialization.
  const Tensor& t2 = out.taps.at(2).value();
  double mean = 0.0;
  for (std::size_t c = 0; c < 32; ++c) mean += t2(0, c) / 32.0;
  EXPECT_NEAR(mean, 0.0, 1e-9);
}

TEST(EncodeWithTapsTest, SameInputSameTaps) {
  const ModelConfig cfg = Cfg();
  MtModel mt = InitMtModel(cfg, 4);
  std::mt19937_64 rng(4);
  const Tensor e = RandomTensor(3, 32, rng);
  Graph g1(false), g2(true);
  const auto a = EncodeWithTaps(g1, mt.text.encoder, g1.Constant(e), cfg.heads, cfg.taps);
  const auto b = EncodeWithTaps(g2, mt.text.encoder, g2.Input(e), cfg.heads, cfg.taps);
  for (int l : cfg.taps) EXPECT_EQ(a.taps.at(l).value(), b.taps.at(l).value());
}

TEST(AcousticEncodeTest, OutputLengths) {
  ModelConfig cfg = Cfg();
  MtModel mt = InitMtModel(cfg, 5);
  SpeechEncoder enc = InitSpeechEncoder(cfg, mt.text, 6);
  std::mt19937_64 rng(5);
  Graph g(false);
  EXPECT_EQ(AcousticEncode(g, enc.acoustic, RandomTensor(16, 8, rng), cfg).rows(), 4u);
  EXPECT_EQ(AcousticEncode(g, enc.acoustic, RandomTensor(17, 8, rng), cfg).rows(), 5u);
  EXPECT_EQ(AcousticOutputLength(17, 4), 5u);
  EXPECT_EQ(AcousticOutputLength(4, 4), 1u);
  try {
    AcousticEncode(g, enc.acoustic, RandomTensor(3, 8, rng), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInputTooShort);
  }
}

TEST(AcousticEncodeTest, ExamplesAreIndependent) {
  ModelConfig cfg = Cfg();
  MtModel mt = InitMtModel(cfg, 5);
  SpeechEncoder enc = InitSpeechEncoder(cfg, mt.text, 6);
  std::mt19937_64 rng(6);
  const Tensor x = RandomTensor(12, 8, rng), y = RandomTensor(20, 8, rng);
  Graph g1(false), g2(false);
  const Tensor ax = AcousticEncode(g1, enc.acoustic, x, cfg).value();
  AcousticEncode(g2, enc.acoustic, y, cfg);
  EXPECT_EQ(AcousticEncode(g2, enc.acoustic, x, cfg).value(), ax);
}

TEST(SpeechEmbedTest, AddsSpecialsAndPositions) {
  ModelConfig cfg = Cfg();
  MtModel mt = InitMtModel(cfg, 7);
  SpeechEncoder enc = InitSpeechEncoder(cfg, mt.text, 8);
  std::mt19937_64 rng(7);
  Graph g(false);
  const Tensor a = RandomTensor(1, 32, rng);
  const Tensor& e = SpeechEmbed(g, enc.embedder, g.Constant(a)).value();
  ASSERT_EQ(e.rows(), 3u);
  const Tensor pos = ops::SinusoidalPositions(3, 32);
  const double s = std::sqrt(32.0);
  for (std::size_t c = 0; c < 32; ++c) {
    EXPECT_NEAR(e(0, c), s * enc.embedder.eps_lang.value[c] + pos(0, c), 1e-12);
    EXPECT_NEAR(e(1, c), s * a(0, c) + pos(1, c), 1e-12);
    EXPECT_NEAR(e(2, c), s * enc.embedder.eps_eos.value[c] + pos(2, c), 1e-12);
  }
  EXPECT_EQ(SpeechEmbed(g, enc.embedder, g.Constant(RandomTensor(4, 32, rng)), false).rows(), 4u);
  try {
    SpeechEmbed(g, enc.embedder, g.Constant(Tensor(0, 32)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCompressedInput);
  }
}

TEST(SpeechEmbedTest, SpecialsCopyTextEmbeddingsAndAreFrozen) {
  ModelConfig cfg = Cfg();
  MtModel mt = InitMtModel(cfg, 9);
  SpeechEncoder enc = InitSpeechEncoder(cfg, mt.text, 10);
  for (std::size_t c = 0; c < 32; ++c) {
    EXPECT_EQ(enc.embedder.eps_lang.value[c], mt.text.embedding.value(0, c));
    EXPECT_EQ(enc.embedder.eps_eos.value[c], mt.text.embedding.value(1, c));
  }
  EXPECT_TRUE(enc.embedder.eps_lang.frozen);
  EXPECT_TRUE(enc.embedder.eps_eos.frozen);
  EXPECT_FALSE(enc.subword.cls.frozen);
}

TEST(DecoderTest, CausalAndShaped) {
  const ModelConfig cfg = Cfg();
  MtModel mt = InitMtModel(cfg, 11);
  std::mt19937_64 rng(11);
  const Tensor enc_out = RandomTensor(5, 32, rng);
  Graph g(false);
  const int one[] = {0};
  const Tensor& l1 = DecoderForward(g, mt.decoder, mt.text, one, g.Constant(enc_out), cfg.heads).value();
  EXPECT_EQ(l1.rows(), 1u);
  EXPECT_EQ(l1.cols(), 12u);

  const int p1[] = {0, 3, 4, 5};
  const int p2[] = {0, 3, 9, 2};
  const Tensor& a = DecoderForward(g, mt.decoder, mt.text, p1, g.Constant(enc_out), cfg.heads).value();
  const Tensor& b = DecoderForward(g, mt.decoder, mt.text, p2, g.Constant(enc_out), cfg.heads).value();
  for (std::size_t c = 0; c < 12; ++c) {
    EXPECT_EQ(a(0, c), b(0, c));
    EXPECT_EQ(a(1, c), b(1, c));
    EXPECT_EQ(a(0, c), l1(0, c));
  }
  bool differs = false;
  for (std::size_t c = 0; c < 12; ++c) differs = differs || a(2, c) != b(2, c);
  EXPECT_TRUE(differs);
}

TEST(InitTest, DeterministicGivenSeed) {
  const ModelConfig cfg = Cfg();
  MtModel a = InitMtModel(cfg, 21), b = InitMtModel(cfg, 21), c = InitMtModel(cfg, 22);
  EXPECT_EQ(Hash(a), Hash(b));
  EXPECT_NE(Hash(a), Hash(c));
}

TEST(InitTest, ParameterNamesAreUnique) {
  const ModelConfig cfg = Cfg();
  MtModel mt = InitMtModel(cfg, 1);
  SpeechEncoder enc = InitSpeechEncoder(cfg, mt.text, 2);
  std::set<std::string> names;
  for (Parameter* p : Parameters(mt)) EXPECT_TRUE(names.insert(p->name).second) << p->name;
  for (Parameter* p : Parameters(enc)) EXPECT_TRUE(names.insert(p->name).second) << p->name;
}

}  // namespace
}  // namespace zeroswot
