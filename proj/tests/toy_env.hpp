// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

// Small generated task plus tiny models for tests that need the whole stack.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "zeroswot/data.hpp"
#include "zeroswot/encoder.hpp"
#include "zeroswot/training.hpp"

namespace zeroswot::testing {

struct ToyEnv {
  explicit ToyEnv(std::size_t examples = 24, std::uint64_t seed = 5) {
    task = BuildToyTask(spec);
    corpus = GenerateCorpus(spec, task, examples, seed);
    model.d = 16;
    model.heads = 2;
    model.ff_dim = 32;
    model.acoustic_layers = 1;
    model.shared_layers = 2;
    model.subword_layers = 1;
    model.decoder_layers = 1;
    model.taps = {1, 2};
    model.letter_vocab = task.letters.size();
    model.subword_vocab = task.subwords.size();
    train.steps = 6;
    train.batch_size = 4;
    train.valid_every = 3;
    train.avg_best_k = 2;
    train.weights.taps = {1, 2};
    mt = InitMtModel(model, 11);
    SetFrozen(Parameters(mt), true);
    asr = AsrView(corpus);
  }

  SpeechContext Context() const { return {model, train, task.letters, task.subwords}; }

  GeneratorSpec spec;
  ToyTask task;
  std::vector<SyntheticExample> corpus;
  std::vector<AsrPair> asr;
  ModelConfig model;
  TrainConfig train;
  MtModel mt;
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace zeroswot::testing
