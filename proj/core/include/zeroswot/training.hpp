// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "zeroswot/autodiff.hpp"
#include "zeroswot/compression.hpp"
#include "zeroswot/data.hpp"
#include "zeroswot/encoder.hpp"
#include "zeroswot/ot.hpp"
#include "zeroswot/vocab.hpp"

namespace zeroswot {

struct LossWeights {
  double alpha = 0.9;
  std::vector<int> taps = {2, 3, 4};
};

/// kConfigInvalid unless alpha is in [0, 1], taps are non-empty, in range and
/// include the final layer.
void ValidateLossWeights(const LossWeights& w, int num_layers);

struct LossBreakdown {
  Var total;
  double ctc = 0.0;
  std::map<int, double> wass;  // per tap, unweighted
};

/// sum_l alpha/|I| * W_l + (1 - alpha) * ctc. kTapMismatch unless both tap
/// maps cover exactly `w.taps`.
LossBreakdown TotalLoss(const std::map<int, Var>& speech_taps,
                        const std::map<int, Var>& text_taps, Var ctc, const LossWeights& w,
                        const OtConfig& ot);

struct MaskConfig {
  double p_time = 0.0;
  int len_time = 10;
  double p_chan = 0.0;
  int len_chan = 2;
};

/// Every frame (channel) starts a zeroed span of len_time (len_chan) with
/// probability p_time (p_chan).
Tensor MaskSpeech(const Tensor& frames, const MaskConfig& cfg, std::uint64_t seed);

/// Text encoder taps for one transcription, keyed by 1-based layer.
using TapSet = std::map<int, Tensor>;

TapSet ComputeTextTaps(const TextBranch& text, const SubwordVocab& vocab, std::string_view x,
                       const ModelConfig& cfg);

class TextTargetStore {
 public:
  virtual ~TextTargetStore() = default;
  /// kMissingExample when no targets exist for `id`.
  virtual const TapSet& Get(const std::string& id, std::string_view transcription) = 0;
};

/// Runs the frozen text branch on demand and caches the result.
class OnlineTargets : public TextTargetStore {
 public:
  OnlineTargets(const TextBranch& text, const SubwordVocab& vocab, const ModelConfig& cfg)
      : text_(text), vocab_(vocab), cfg_(cfg) {}
  const TapSet& Get(const std::string& id, std::string_view transcription) override;

 private:
  const TextBranch& text_;
  const SubwordVocab& vocab_;
  ModelConfig cfg_;
  std::map<std::string, TapSet> cache_;
};

/// Reads targets written by ExtractTextTargets; files are loaded lazily.
class OfflineTargets : public TextTargetStore {
 public:
  explicit OfflineTargets(std::filesystem::path dir) : dir_(std::move(dir)) {}
  const TapSet& Get(const std::string& id, std::string_view transcription) override;

 private:
  std::filesystem::path dir_;
  std::map<std::string, TapSet> cache_;
};

/// Writes every shared-encoder tap for each example to `dir/<id>.ckpt`.
/// Returns the number of files written.
std::size_t ExtractTextTargets(std::span<const AsrPair> corpus, const TextBranch& text,
                               const SubwordVocab& vocab, const ModelConfig& cfg,
                               const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Toy MT pretraining.

struct MtTrainConfig {
  std::uint64_t seed = 1;
  int steps = 1500;
  int batch_size = 16;
  double base_lr = 1e-3;
  int warmup = 200;
  double label_smoothing = 0.1;
  int log_every = 50;
};

struct MtTrainResult {
  MtModel model;
  std::vector<double> losses;  // per step
  double valid_accuracy = 0.0;  // teacher-forced next-token accuracy
};

/// Decoder input is <lang> + y, target is y + </s>.
MtTrainResult TrainToyMt(std::span<const MtPair> train, std::span<const MtPair> valid,
                         const SubwordVocab& vocab, const ModelConfig& model_cfg,
                         const MtTrainConfig& cfg, std::ostream* log = nullptr);

double TeacherForcedAccuracy(const MtModel& mt, std::span<const MtPair> pairs,
                             const SubwordVocab& vocab, const ModelConfig& cfg);

// ---------------------------------------------------------------------------
// Speech encoder training.

struct TrainConfig {
  std::uint64_t seed = 1;
  int steps = 5000;
  int batch_size = 16;
  double base_lr = 1e-3;
  int warmup = 200;
  int valid_every = 100;
  int patience = 10;
  int avg_best_k = 5;
  OtConfig ot;
  LossWeights weights;
  MaskConfig mask;
  AdapterMode adapter = AdapterMode::kSubword;
  LabelMode label_mode = LabelMode::kSubwordUnk;
  bool no_speech_embedder = false;
  bool no_aux_wass = false;
  bool include_separator = false;
  int threads = 1;
};

/// Taps actually optimized: the final layer only under no_aux_wass.
LossWeights EffectiveWeights(const TrainConfig& cfg, int num_layers);

struct StepMetrics {
  int step = 0;
  double lr = 0.0;
  double loss_total = 0.0;
  double loss_ctc = 0.0;
  std::map<int, double> loss_wass;
  int skipped_infeasible = 0;  // cumulative
};

std::string ToJsonLine(const StepMetrics& m);

struct ValidationPoint {
  int step = 0;
  double wass_final = 0.0;   // mean final-layer Wasserstein
  int fallback_uncompressed = 0;
};

struct SpeechTrainResult {
  SpeechEncoder model;  // average of the best snapshots
  std::vector<std::vector<Parameter>> best_snapshots;
  std::vector<ValidationPoint> validation;
  int steps_run = 0;
  int skipped_infeasible = 0;
  bool early_stopped = false;
};

/// Everything a single speech training example needs; no translations.
struct SpeechContext {
  const ModelConfig& model_cfg;
  const TrainConfig& train_cfg;
  const LetterVocab& letters;
  const SubwordVocab& subwords;
};

struct ExampleLoss {
  bool feasible = true;
  bool compressed = true;  // false when the adapter produced no chunks
  double total = 0.0;
  double ctc = 0.0;
  std::map<int, double> wass;
};

/// Forward and (when g records) backward for one example.
ExampleLoss SpeechExampleLoss(Graph& g, const SpeechEncoder& enc, const TextBranch& text,
                              const SpeechContext& ctx, const Tensor& frames,
                              std::string_view transcription, const TapSet& targets);

/// Encoder output of the speech path with taps. With `used_fallback` set, an
/// adapter that yields nothing falls back to the uncompressed acoustic states
/// instead of throwing.
EncoderOutput SpeechForward(Graph& g, const SpeechEncoder& enc, const TextBranch& text,
                            const SpeechContext& ctx, const Tensor& frames,
                            std::span<const int> taps, bool* used_fallback = nullptr);

double ValidationWasserstein(const SpeechEncoder& enc, const TextBranch& text,
                             const SpeechContext& ctx, std::span<const AsrPair> valid,
                             TextTargetStore& targets, int* fallbacks = nullptr);

SpeechTrainResult TrainSpeechEncoder(std::span<const AsrPair> train,
                                     std::span<const AsrPair> valid, const TextBranch& text,
                                     TextTargetStore& targets, const SpeechContext& ctx,
                                     std::ostream* metrics = nullptr,
                                     std::ostream* validation_log = nullptr);

/// Worker count from ZEROSWOT_THREADS, clamped to [1, hardware threads].
int ThreadsFromEnv(int fallback);

}  // namespace zeroswot
