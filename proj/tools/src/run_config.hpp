// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "zeroswot/data.hpp"
#include "zeroswot/encoder.hpp"
#include "zeroswot/training.hpp"

namespace zeroswot::cli {

struct CorpusSizes {
  std::size_t train = 2000;
  std::size_t valid = 200;
  std::size_t test = 200;
};

struct EvalConfig {
  int beam = 5;
  int max_len = 12;
};

struct PathsConfig {
  std::string data_dir;       // reuse a corpus from another run
  std::string mt_checkpoint;  // reuse a trained toy MT model
};

struct RunConfig {
  std::uint64_t seed = 1;
  GeneratorSpec generator;
  CorpusSizes corpus;
  ModelConfig model;
  MtTrainConfig mt;
  TrainConfig train;
  int valid_examples = 200;  // validation subset used for early stopping
  bool offline_targets = true;
  EvalConfig eval;
  PathsConfig paths;
};

/// Strict reader: unknown keys and wrong types raise kConfigInvalid naming
/// the JSON path.
RunConfig ParseRunConfig(const nlohmann::json& doc);
nlohmann::ordered_json ToJson(const RunConfig& cfg);

/// KEY=VALUE for adapter_mode, label_mode, no_speech_embedder, no_aux_wass,
/// include_separator, debiased.
void ApplyAblation(RunConfig& cfg, std::string_view assignment);

/// Fills derived fields (vocab sizes, frame geometry, seeds) and validates.
void FinalizeConfig(RunConfig& cfg, int letter_vocab, int subword_vocab);

RunConfig LoadRunConfig(const std::filesystem::path& path);

}  // namespace zeroswot::cli
