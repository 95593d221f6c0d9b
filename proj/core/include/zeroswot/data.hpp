// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "zeroswot/tensor.hpp"
#include "zeroswot/vocab.hpp"

namespace zeroswot {

inline constexpr int kCorpusSchemaVersion = 1;

/// Knobs of the synthetic speech/text generator.
struct GeneratorSpec {
  std::string alphabet = "ACDEHILMNORSTU";
  std::string punctuation = ".";
  std::vector<std::string> lexicon = {
      "RANDOM", "SENTENCE", "LEMON",  "MELON",  "SALMON",   "CASTLE", "MUSIC", "CHAIR",
      "TRAIN",  "STONE",    "MOUNTAIN", "ISLAND", "CANDLE", "HORSE",  "CLOUD", "DANCE"};
  std::vector<std::string> subwords = {
      "RAND", "OM",  "SENT", "ENCE", "LEM", "ON",   "MEL", "SAL", "CAST", "LE",
      "MUS",  "IC",  "CHA",  "IR",   "TRA", "IN",   "ST",  "ONE", "MOUN", "TA",
      "IS",   "LAND", "CAND", "HOR", "SE",  "CLO",  "UD",  "DAN", "CE"};
  int min_words = 2;
  int max_words = 4;
  int min_repeat = 1;   // CTC-rate frames per label
  int max_repeat = 2;
  int min_silence = 1;  // blank frames between words and at both ends
  int max_silence = 2;
  double noise_sigma = 0.3;
  double punctuation_prob = 0.5;
  std::uint64_t mapping_seed = 20240;
  int feature_dim = 8;
  int downsample = 4;
};

void ValidateGeneratorSpec(const GeneratorSpec& spec);

struct SyntheticExample {
  std::string id;
  Tensor frames;                 // l x f
  std::string transcription;
  std::vector<int> translation;  // SubwordVocab ids, no </s>
  std::vector<int> alignment;    // LetterVocab id per acoustic-encoder frame (l / r)
};

/// What the speech trainer may see.
struct AsrPair {
  const std::string* id;
  const Tensor* frames;
  const std::string* transcription;
};

/// What the MT trainer may see.
struct MtPair {
  const std::string* id;
  const std::string* transcription;
  const std::vector<int>* translation;
};

std::vector<AsrPair> AsrView(const std::vector<SyntheticExample>& corpus);
std::vector<MtPair> MtView(const std::vector<SyntheticExample>& corpus);

/// Vocabularies and the word cipher derived from a spec.
struct ToyTask {
  LetterVocab letters;
  SubwordVocab subwords;
  std::vector<int> cipher;  // lexicon index -> target subword id
  std::vector<std::string> target_tokens;

  /// Reversed word-by-word cipher; punctuation is ignored.
  std::vector<int> Translate(std::string_view text, const GeneratorSpec& spec) const;
};

ToyTask BuildToyTask(const GeneratorSpec& spec);

/// Deterministic in (spec, size, seed). Transcriptions are unique.
std::vector<SyntheticExample> GenerateCorpus(const GeneratorSpec& spec, const ToyTask& task,
                                             std::size_t size, std::uint64_t seed);

struct CorpusSplit {
  std::vector<SyntheticExample> train, valid, test;
};

/// Seeded shuffle then cut; kBadFractions unless fractions are >= 0 and sum
/// to 1.
CorpusSplit SplitCorpus(std::vector<SyntheticExample> corpus, std::span<const double> fractions,
                        std::uint64_t seed);

/// One JSON object per line, frames as base64 little-endian float64.
void WriteCorpus(const std::filesystem::path& path, const std::vector<SyntheticExample>& corpus);
std::vector<SyntheticExample> ReadCorpus(const std::filesystem::path& path);

std::string Base64Encode(std::span<const unsigned char> bytes);
std::vector<unsigned char> Base64Decode(std::string_view text);

/// splitmix64 finaliser; used to derive per-example seeds.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t salt);

}  // namespace zeroswot
