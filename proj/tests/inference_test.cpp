// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "toy_env.hpp"
#include "zeroswot/error.hpp"
#include "zeroswot/inference.hpp"
#include "zeroswot/ops.hpp"

namespace zeroswot {
namespace {

using testing::RandomTensor;
using testing::ToyEnv;

// Teacher-forced log-probability of `tokens` under the decoder.
double SequenceLogProb(const MtModel& mt, const Tensor& enc, const std::vector<int>& tokens,
                       const SubwordVocab& vocab, int heads) {
  std::vector<int> prefix = {vocab.lang_id()};
  prefix.insert(prefix.end(), tokens.begin(), tokens.end() - 1);
  Graph g(false);
  const Tensor lp =
      ops::LogSoftmaxRows(DecoderForward(g, mt.decoder, mt.text, prefix, g.Constant(enc), heads))
          .value();
  double total = 0.0;
  for (std::size_t t = 0; t < tokens.size(); ++t) total += lp(t, static_cast<std::size_t>(tokens[t]));
  return total;
}

TEST(BeamSearchTest, WidthOneIsGreedy) {
  ToyEnv env;
  for (std::size_t i = 0; i < 5; ++i) {
    const Tensor enc = TextEncode(env.mt, env.task.subwords, env.corpus[i].transcription, env.model);
    const auto beam = BeamSearch(env.mt, enc, env.task.subwords, env.model.heads, 1, 8);
    ASSERT_FALSE(beam.empty());
    EXPECT_EQ(beam.front().tokens, GreedyTranslate(env.mt, enc, env.task.subwords, env.model.heads, 8));
  }
}

TEST(BeamSearchTest, ScoresAreLengthNormalizedAndSorted) {
  ToyEnv env;
  const Tensor enc = TextEncode(env.mt, env.task.subwords, env.corpus[0].transcription, env.model);
  const auto hyps = BeamSearch(env.mt, enc, env.task.subwords, env.model.heads, 4, 6);
  ASSERT_FALSE(hyps.empty());
  for (std::size_t k = 0; k < hyps.size(); ++k) {
    const Hypothesis& h = hyps[k];
    ASSERT_FALSE(h.tokens.empty());
    EXPECT_NEAR(h.log_prob,
                SequenceLogProb(env.mt, enc, h.tokens, env.task.subwords, env.model.heads), 1e-9);
    EXPECT_NEAR(h.score, h.log_prob / static_cast<double>(h.tokens.size()), 1e-12);
    EXPECT_EQ(h.finished, h.tokens.back() == env.task.subwords.eos_id());
    if (k) EXPECT_GE(hyps[k - 1].score, h.score);
  }
}

TEST(BeamSearchTest, RejectsZeroWidth) {
  ToyEnv env;
  const Tensor enc = TextEncode(env.mt, env.task.subwords, "LEMON", env.model);
  EXPECT_THROW(BeamSearch(env.mt, enc, env.task.subwords, env.model.heads, 0, 4), Error);
}

TEST(StripEosTest, RemovesOnlyTrailingEos) {
  ToyEnv env;
  const int eos = env.task.subwords.eos_id();
  EXPECT_EQ(StripEos({5, 6, eos}, env.task.subwords), (std::vector<int>{5, 6}));
  EXPECT_EQ(StripEos({5, 6}, env.task.subwords), (std::vector<int>{5, 6}));
  EXPECT_TRUE(StripEos({}, env.task.subwords).empty());
}

TEST(TokenAccuracyTest, PositionwiseOverLongerSequence) {
  TokenAccuracy acc;
  const int h1[] = {1, 2, 3};
  const int r1[] = {1, 9, 3, 4};
  acc.Add(h1, r1);
  EXPECT_EQ(acc.correct, 2u);
  EXPECT_EQ(acc.total, 4u);
  const int h2[] = {7, 7};
  const int r2[] = {7};
  acc.Add(h2, r2);
  EXPECT_EQ(acc.correct, 3u);
  EXPECT_EQ(acc.total, 6u);
  EXPECT_DOUBLE_EQ(acc.value(), 0.5);
  EXPECT_EQ(TokenAccuracy{}.value(), 0.0);
}

struct RetrievalCase {
  std::vector<Tensor> text;
  std::vector<std::string> ids;
  explicit RetrievalCase(std::uint64_t seed, std::size_t n = 8) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len(2, 6);
    for (std::size_t i = 0; i < n; ++i) {
      text.push_back(RandomTensor(static_cast<std::size_t>(len(rng)), 4, rng));
      ids.push_back("ex" + std::to_string(i));
    }
  }
};

TEST(RetrievalTest, SelfRetrievalIsPerfect) {
  const RetrievalCase c(1);
  for (auto metric : {RetrievalMetric::kWasserstein, RetrievalMetric::kCosineMeanpool}) {
    const auto r = Retrieve(c.text, c.text, c.ids, metric, OtConfig{});
    EXPECT_EQ(r.accuracy, 1.0) << ToString(metric);
    EXPECT_TRUE(r.mismatches.empty());
  }
}

TEST(RetrievalTest, SwappedPairsAreReportedExactly) {
  const RetrievalCase c(2);
  std::vector<Tensor> speech = c.text;
  std::mt19937_64 rng(3);
  for (Tensor& s : speech) {
    const Tensor noise = RandomTensor(s.rows(), s.cols(), rng, 0.01);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += noise[i];
  }
  std::swap(speech[2], speech[5]);
  const auto r = Retrieve(speech, c.text, c.ids, RetrievalMetric::kWasserstein, OtConfig{});
  EXPECT_DOUBLE_EQ(r.accuracy, 6.0 / 8.0);
  EXPECT_EQ(r.mismatches, (std::vector<std::string>{"ex2", "ex5"}));
}

TEST(RetrievalTest, ThreadCountDoesNotChangeResults) {
  const RetrievalCase c(4);
  std::vector<Tensor> speech(c.text.rbegin(), c.text.rend());
  const auto a = Retrieve(speech, c.text, c.ids, RetrievalMetric::kWasserstein, OtConfig{}, 1);
  const auto b = Retrieve(speech, c.text, c.ids, RetrievalMetric::kWasserstein, OtConfig{}, 3);
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_EQ(a.mismatches, b.mismatches);
}

TEST(RetrievalTest, MisalignedInputs) {
  const RetrievalCase c(5);
  const std::vector<Tensor> shorter(c.text.begin(), c.text.end() - 1);
  EXPECT_THROW(Retrieve(shorter, c.text, c.ids, RetrievalMetric::kCosineMeanpool, OtConfig{}), Error);
}

std::vector<const SyntheticExample*> Pointers(const std::vector<SyntheticExample>& corpus) {
  std::vector<const SyntheticExample*> out;
  for (const auto& ex : corpus) out.push_back(&ex);
  return out;
}

TEST(LengthReportTest, OracleSubwordAdapterMatchesTextLength) {
  ToyEnv env(60);
  const SpeechEncoder enc = InitSpeechEncoder(env.model, env.mt.text, 2);
  const auto ptrs = Pointers(env.corpus);
  const LengthSummary s = LengthReport(ptrs, enc, env.Context(), true);
  EXPECT_EQ(s.no_chunks, 0);
  ASSERT_EQ(s.rows.size(), 60u);
  EXPECT_EQ(s.mean_abs_diff, 0.0);
  EXPECT_EQ(s.mean_ratio, 1.0);
  for (const LengthRow& row : s.rows) EXPECT_EQ(row.speech_len, row.text_len) << row.id;
}

TEST(LengthReportTest, UncompressedSpeechIsMuchLonger) {
  ToyEnv env(60);
  env.train.adapter = AdapterMode::kNone;
  const SpeechEncoder enc = InitSpeechEncoder(env.model, env.mt.text, 2);
  const auto ptrs = Pointers(env.corpus);
  const LengthSummary s = LengthReport(ptrs, enc, env.Context(), true);
  ASSERT_EQ(s.rows.size(), 60u);
  EXPECT_GT(s.mean_ratio, 2.0);
  for (const LengthRow& row : s.rows) {
    const auto& ex = env.corpus[static_cast<std::size_t>(std::stoi(row.id.substr(2)))];
    EXPECT_EQ(row.speech_len, ex.alignment.size() + 2);
  }
}

TEST(LengthReportTest, NoEmbedderDropsSpecials) {
  ToyEnv env(20);
  env.train.no_speech_embedder = true;
  const SpeechEncoder enc = InitSpeechEncoder(env.model, env.mt.text, 2);
  const auto ptrs = Pointers(env.corpus);
  const LengthSummary s = LengthReport(ptrs, enc, env.Context(), true);
  for (const LengthRow& row : s.rows) EXPECT_EQ(row.speech_len + 2, row.text_len);
}

TEST(ZeroShotEncodeTest, ShapesFollowTheAdapter) {
  ToyEnv env(10);
  const SpeechEncoder enc = InitSpeechEncoder(env.model, env.mt.text, 2);
  const ZeroShotModel model{&env.mt, &enc};
  const auto ctx = env.Context();
  std::size_t encoded = 0;
  for (const auto& ex : env.corpus) {
    try {
      const Tensor h = ZeroShotEncode(model, ctx, ex.frames);
      EXPECT_EQ(h.cols(), 16u);
      EXPECT_GE(h.rows(), 3u);
      ++encoded;
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::kNoChunks || e.code() == ErrorCode::kNoCharacters);
    }
  }
  EXPECT_GT(encoded, 0u);
}

}  // namespace
}  // namespace zeroswot
