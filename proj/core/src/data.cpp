// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "zeroswot/ctc.hpp"
#include "zeroswot/error.hpp"

namespace zeroswot {
namespace {

constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string TargetToken(std::size_t index) {
  static constexpr std::string_view kConsonants = "bdfgkmnprstvz";
  static constexpr std::string_view kVowels = "aeiou";
  std::string tok;
  tok += kConsonants[index % kConsonants.size()];
  tok += kVowels[(index / kConsonants.size()) % kVowels.size()];
  if (index >= kConsonants.size() * kVowels.size()) {
    tok += std::to_string(index / (kConsonants.size() * kVowels.size()));
  }
  return tok;
}

std::string StripPunctuation(std::string_view word, std::string_view punctuation) {
  std::string out;
  for (char c : word) {
    if (punctuation.find(c) == std::string_view::npos) out += c;
  }
  return out;
}

int UniformInt(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void ValidateGeneratorSpec(const GeneratorSpec& spec) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kConfigInvalid, m); };
  if (spec.alphabet.empty()) fail("generator.alphabet must not be empty");
  if (spec.lexicon.empty()) fail("generator.lexicon must not be empty");
  if (spec.min_words < 1 || spec.max_words < spec.min_words) fail("generator word range invalid");
  if (spec.min_repeat < 1 || spec.max_repeat < spec.min_repeat) {
    fail("generator repeat range invalid (repeats >= 1)");
  }
  if (spec.min_silence < 0 || spec.max_silence < spec.min_silence) {
    fail("generator silence range invalid");
  }
  if (spec.noise_sigma < 0.0) fail("generator.noise_sigma must be >= 0");
  if (spec.punctuation_prob < 0.0 || spec.punctuation_prob > 1.0) {
    fail("generator.punctuation_prob must lie in [0, 1]");
  }
  if (spec.feature_dim < 1 || spec.downsample < 1) fail("generator frame geometry invalid");
  for (const auto& w : spec.lexicon) {
    if (w.empty()) fail("generator.lexicon has an empty word");
    for (char c : w) {
      if (spec.alphabet.find(c) == std::string::npos) {
        fail("generator.lexicon word " + w + " uses a character outside the alphabet");
      }
    }
  }
}

std::vector<AsrPair> AsrView(const std::vector<SyntheticExample>& corpus) {
  std::vector<AsrPair> out;
  out.reserve(corpus.size());
  for (const auto& ex : corpus) out.push_back({&ex.id, &ex.frames, &ex.transcription});
  return out;
}

std::vector<MtPair> MtView(const std::vector<SyntheticExample>& corpus) {
  std::vector<MtPair> out;
  out.reserve(corpus.size());
  for (const auto& ex : corpus) out.push_back({&ex.id, &ex.transcription, &ex.translation});
  return out;
}

ToyTask BuildToyTask(const GeneratorSpec& spec) {
  ValidateGeneratorSpec(spec);
  ToyTask task{LetterVocab::FromLetters(spec.alphabet), {}, {}, {}};
  std::vector<std::string> pieces = spec.subwords;
  for (char c : spec.alphabet) pieces.emplace_back(1, c);
  for (char c : spec.punctuation) pieces.emplace_back(1, c);
  for (std::size_t i = 0; i < spec.lexicon.size(); ++i) {
    task.target_tokens.push_back(TargetToken(i));
    pieces.push_back(task.target_tokens.back());
  }
  // Multi-character pieces may repeat a single letter; keep the first copy.
  std::vector<std::string> unique;
  std::set<std::string> seen;
  for (auto& p : pieces) {
    if (seen.insert(p).second) unique.push_back(std::move(p));
  }
  task.subwords = SubwordVocab::Create(std::move(unique), spec.alphabet + spec.punctuation);

  std::vector<int> order(spec.lexicon.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(MixSeed(spec.mapping_seed, 0xC1F));
  std::shuffle(order.begin(), order.end(), rng);
  for (int k : order) {
    task.cipher.push_back(*task.subwords.Find(task.target_tokens[static_cast<std::size_t>(k)]));
  }
  return task;
}

std::vector<int> ToyTask::Translate(std::string_view text, const GeneratorSpec& spec) const {
  std::vector<int> out;
  std::size_t i = 0;
  const std::string upper = ToUpper(text);
  std::string_view t = upper;
  while (i < t.size()) {
    while (i < t.size() && t[i] == ' ') ++i;
    std::size_t j = i;
    while (j < t.size() && t[j] != ' ') ++j;
    if (j > i) {
      const std::string word = StripPunctuation(t.substr(i, j - i), spec.punctuation);
      auto it = std::find(spec.lexicon.begin(), spec.lexicon.end(), word);
      if (it == spec.lexicon.end()) {
        throw Error(ErrorCode::kUnknownTokenId, "word " + word + " is not in the lexicon");
      }
      out.push_back(cipher[static_cast<std::size_t>(it - spec.lexicon.begin())]);
    }
    i = j;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<SyntheticExample> GenerateCorpus(const GeneratorSpec& spec, const ToyTask& task,
                                             std::size_t size, std::uint64_t seed) {
  ValidateGeneratorSpec(spec);
  const auto f = static_cast<std::size_t>(spec.feature_dim);
  const auto r = static_cast<std::size_t>(spec.downsample);

  // Base vector per acoustic symbol: blank, sep, letters, punctuation.
  const std::string symbols = spec.alphabet + spec.punctuation;
  Tensor base(2 + symbols.size(), f);
  {
    std::mt19937_64 rng(MixSeed(spec.mapping_seed, 0xBA5E));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : base.values()) v = normal(rng);
  }
  auto symbol_row = [&](char c) { return 2 + symbols.find(c); };

  // Sentences are drawn sequentially so uniqueness is well defined; frames
  // then come from per-example seeds.
  std::vector<std::string> sentences;
  {
    std::mt19937_64 rng(MixSeed(seed, 0x5E47));
    std::set<std::string> seen;
    std::size_t attempts = 0;
    while (sentences.size() < size) {
      if (++attempts > size * 1000 + 1000) {
        throw Error(ErrorCode::kConfigInvalid, "generator cannot produce enough unique sentences");
      }
      const int words = UniformInt(rng, spec.min_words, spec.max_words);
      std::string s;
      for (int w = 0; w < words; ++w) {
        if (w) s += ' ';
        s += spec.lexicon[static_cast<std::size_t>(
            UniformInt(rng, 0, static_cast<int>(spec.lexicon.size()) - 1))];
      }
      if (!spec.punctuation.empty() &&
          std::uniform_real_distribution<double>(0.0, 1.0)(rng) < spec.punctuation_prob) {
        s += spec.punctuation[static_cast<std::size_t>(
            UniformInt(rng, 0, static_cast<int>(spec.punctuation.size()) - 1))];
      }
      if (seen.insert(s).second) sentences.push_back(std::move(s));
    }
  }

  const LetterVocab& letters = task.letters;
  std::vector<SyntheticExample> corpus(size);
  for (std::size_t i = 0; i < size; ++i) {
    SyntheticExample& ex = corpus[i];
    std::mt19937_64 rng(MixSeed(seed, i + 1));
    std::normal_distribution<double> noise(0.0, 1.0);
    ex.id = "ex" + std::to_string(i);
    ex.transcription = sentences[i];
    ex.translation = task.Translate(ex.transcription, spec);

    std::vector<std::size_t> rows;  // base-vector row per CTC-rate frame
    auto emit = [&](int label, std::size_t row, int count) {
      if (!ex.alignment.empty() && ex.alignment.back() == label && label != letters.blank_id()) {
        ex.alignment.push_back(letters.blank_id());
        rows.push_back(0);
      }
      for (int k = 0; k < count; ++k) {
        ex.alignment.push_back(label);
        rows.push_back(row);
      }
    };
    auto silence = [&] {
      emit(letters.blank_id(), 0, UniformInt(rng, spec.min_silence, spec.max_silence));
    };

    silence();
    for (const auto& word : TokenizeWords(ToUpper(ex.transcription), task.subwords)) {
      for (int piece : word) {
        for (char c : task.subwords.piece(piece)) {
          const int label = letters.Find(c).value_or(letters.unk_id());
          emit(label, symbol_row(c), UniformInt(rng, spec.min_repeat, spec.max_repeat));
        }
        emit(letters.sep_id(), 1, UniformInt(rng, spec.min_repeat, spec.max_repeat));
      }
      silence();
    }

    ex.frames = Tensor(rows.size() * r, f);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      for (std::size_t k = 0; k < r; ++k) {
        for (std::size_t c = 0; c < f; ++c) {
          ex.frames(t * r + k, c) = base(rows[t], c) + spec.noise_sigma * noise(rng);
        }
      }
    }

    const auto expected =
        BuildCtcLabels(ex.transcription, LabelMode::kSubwordUnk, letters, task.subwords).ids;
    if (CollapsePath(ex.alignment, letters.blank_id()) != expected) {
      throw Error(ErrorCode::kFormat, "generated alignment does not collapse to its labels");
    }
  }
  return corpus;
}

CorpusSplit SplitCorpus(std::vector<SyntheticExample> corpus, std::span<const double> fractions,
                        std::uint64_t seed) {
  if (fractions.size() != 3) throw Error(ErrorCode::kBadFractions, "need three fractions");
  double total = 0.0;
  for (double x : fractions) {
    if (x < 0.0) throw Error(ErrorCode::kBadFractions, "negative fraction");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::kBadFractions, "fractions must sum to 1");

  const std::size_t n = corpus.size();
  std::size_t counts[3];
  double remainders[3];
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double exact = fractions[static_cast<std::size_t>(k)] * static_cast<double>(n);
    counts[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainders[k] = exact - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  while (assigned < n) {
    const int k = static_cast<int>(std::max_element(remainders, remainders + 3) - remainders);
    ++counts[k];
    remainders[k] = -1.0;
    ++assigned;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(MixSeed(seed, 0x5917));
  std::shuffle(order.begin(), order.end(), rng);

  CorpusSplit split;
  std::vector<SyntheticExample>* parts[3] = {&split.train, &split.valid, &split.test};
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    for (std::size_t c = 0; c < counts[k]; ++c) parts[k]->push_back(std::move(corpus[order[pos++]]));
  }
  return split;
}

std::string Base64Encode(std::span<const unsigned char> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
    if (i + 2 < bytes.size()) chunk |= bytes[i + 2];
    out += kB64[(chunk >> 18) & 63];
    out += kB64[(chunk >> 12) & 63];
    out += i + 1 < bytes.size() ? kB64[(chunk >> 6) & 63] : '=';
    out += i + 2 < bytes.size() ? kB64[chunk & 63] : '=';
  }
  return out;
}

std::vector<unsigned char> Base64Decode(std::string_view text) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) throw Error(ErrorCode::kFormat, "base64 length not a multiple of 4");
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t chunk = 0;
    int pad = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        ++pad;
        chunk <<= 6;
        continue;
      }
      const int v = value(c);
      if (v < 0 || pad) throw Error(ErrorCode::kFormat, "invalid base64 character");
      chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
    }
    out.push_back(static_cast<unsigned char>(chunk >> 16));
    if (pad < 2) out.push_back(static_cast<unsigned char>((chunk >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<unsigned char>(chunk & 0xFF));
  }
  return out;
}

void WriteCorpus(const std::filesystem::path& path, const std::vector<SyntheticExample>& corpus) {
  std::ofstream os(path, std::ios::trunc | std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write corpus " + path.string());
  for (const auto& ex : corpus) {
    std::vector<unsigned char> bytes;
    bytes.reserve(ex.frames.size() * 8);
    for (double v : ex.frames.values()) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      for (int k = 0; k < 8; ++k) bytes.push_back(static_cast<unsigned char>(bits >> (8 * k)));
    }
    nlohmann::json j = {
        {"schema_version", kCorpusSchemaVersion},
        {"id", ex.id},
        {"transcription", ex.transcription},
        {"translation", ex.translation},
        {"alignment", ex.alignment},
        {"frames",
         {{"rows", ex.frames.rows()}, {"cols", ex.frames.cols()}, {"data", Base64Encode(bytes)}}},
    };
    os << j.dump() << '\n';
  }
  if (!os) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<SyntheticExample> ReadCorpus(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open corpus " + path.string());
  std::vector<SyntheticExample> corpus;
  std::size_t line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("schema_version").get<int>() != kCorpusSchemaVersion) {
        throw Error(ErrorCode::kFormat, "unsupported corpus schema version");
      }
      SyntheticExample ex;
      ex.id = j.at("id").get<std::string>();
      ex.transcription = j.at("transcription").get<std::string>();
      ex.translation = j.at("translation").get<std::vector<int>>();
      ex.alignment = j.at("alignment").get<std::vector<int>>();
      const auto& fr = j.at("frames");
      const auto rows = fr.at("rows").get<std::size_t>();
      const auto cols = fr.at("cols").get<std::size_t>();
      const auto bytes = Base64Decode(fr.at("data").get<std::string>());
      if (bytes.size() != rows * cols * 8) throw Error(ErrorCode::kFormat, "frame payload size");
      ex.frames = Tensor(rows, cols);
      for (std::size_t i = 0; i < rows * cols; ++i) {
        std::uint64_t bits = 0;
        for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[i * 8 + k]) << (8 * k);
        ex.frames[i] = std::bit_cast<double>(bits);
      }
      corpus.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormat,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

}  // namespace zeroswot
