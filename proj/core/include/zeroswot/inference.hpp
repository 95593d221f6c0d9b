// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zeroswot/data.hpp"
#include "zeroswot/encoder.hpp"
#include "zeroswot/ot.hpp"
#include "zeroswot/training.hpp"

namespace zeroswot {

/// Speech encoder swapped in for the MT embedding layer. Borrowed pointers.
struct ZeroShotModel {
  const MtModel* mt = nullptr;
  const SpeechEncoder* speech = nullptr;
};

/// Speech path through the frozen shared encoder; (n_sw + 2) x d with the
/// speech embedder. Propagates kNoChunks.
Tensor ZeroShotEncode(const ZeroShotModel& model, const SpeechContext& ctx, const Tensor& frames);

/// Text path: <lang> + x + </s> through embedding and shared encoder.
Tensor TextEncode(const MtModel& mt, const SubwordVocab& vocab, std::string_view x,
                  const ModelConfig& cfg);

struct Hypothesis {
  std::vector<int> tokens;  // without the leading <lang>, with </s> if finished
  double log_prob = 0.0;
  double score = 0.0;       // log_prob / tokens.size()
  bool finished = false;
};

/// Returns every hypothesis that left the beam by emitting </s> or hitting
/// max_len, best score first. beam = 1 is greedy decoding.
std::vector<Hypothesis> BeamSearch(const MtModel& mt, const Tensor& encoder_out,
                                   const SubwordVocab& vocab, int heads, int beam, int max_len);

/// Argmax decoding; ties go to the lowest id.
std::vector<int> GreedyTranslate(const MtModel& mt, const Tensor& encoder_out,
                                 const SubwordVocab& vocab, int heads, int max_len);

/// Drops a trailing </s>.
std::vector<int> StripEos(std::vector<int> tokens, const SubwordVocab& vocab);

/// Position-wise matches over max(|hyp|, |ref|); both sequences exclude </s>.
struct TokenAccuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
  double value() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
  void Add(std::span<const int> hyp, std::span<const int> ref);
};

enum class RetrievalMetric { kCosineMeanpool, kWasserstein };

std::string_view ToString(RetrievalMetric m);

struct RetrievalReport {
  RetrievalMetric metric = RetrievalMetric::kWasserstein;
  double accuracy = 0.0;
  std::vector<std::string> mismatches;
};

/// speech[i] pairs with text[i]; top-1 over all texts, ties to the lowest
/// index.
RetrievalReport Retrieve(std::span<const Tensor> speech, std::span<const Tensor> text,
                         std::span<const std::string> ids, RetrievalMetric metric,
                         const OtConfig& cfg, int threads = 1);

struct LengthRow {
  std::string id;
  std::size_t speech_len = 0;  // n', with specials when the embedder adds them
  std::size_t text_len = 0;    // m, with <lang> and </s>
  double abs_diff = 0.0;
  double ratio = 0.0;
};

struct LengthSummary {
  std::vector<LengthRow> rows;
  double mean_abs_diff = 0.0;
  double mean_ratio = 0.0;
  int no_chunks = 0;  // examples the adapter could not compress (excluded)
};

/// Log-probabilities that make `alignment` the greedy CTC path.
Tensor OracleLogProbs(std::span<const int> alignment, int vocab_size);

/// Compares speech and text sequence lengths. With `oracle` set the greedy
/// path comes from each example's alignment instead of the CTC head.
LengthSummary LengthReport(std::span<const SyntheticExample* const> corpus,
                           const SpeechEncoder& speech, const SpeechContext& ctx, bool oracle);

}  // namespace zeroswot
