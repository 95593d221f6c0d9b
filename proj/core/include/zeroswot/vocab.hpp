// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace zeroswot {

inline constexpr std::string_view kBlankSymbol = "<blank>";
inline constexpr std::string_view kUnkSymbol = "<unk>";
inline constexpr std::string_view kSepSymbol = "<sep>";
inline constexpr std::string_view kLangSymbol = "<lang>";
inline constexpr std::string_view kEosSymbol = "</s>";

/// CTC output inventory: <blank>=0, <unk>, <sep>, then single uppercase
/// letters. Immutable after construction.
class LetterVocab {
 public:
  /// Specials followed by one symbol per character of `letters`.
  static LetterVocab FromLetters(std::string_view letters);
  /// Symbols as read from a vocabulary file; the three specials must lead.
  static LetterVocab FromSymbols(std::vector<std::string> symbols);
  static LetterVocab Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  int blank_id() const { return 0; }
  int unk_id() const { return 1; }
  int sep_id() const { return 2; }
  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& symbol(int id) const { return symbols_.at(static_cast<std::size_t>(id)); }

  /// Id of a single (already uppercased) character, if it is a letter of V.
  std::optional<int> Find(char c) const;

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<char, int> by_char_;
};

/// Text-branch subword inventory with <lang> and </s> specials at ids 0, 1.
class SubwordVocab {
 public:
  /// `pieces` must not contain the specials. Every character of `alphabet`
  /// must be present as a one-character piece.
  static SubwordVocab Create(std::vector<std::string> pieces, std::string_view alphabet);
  static SubwordVocab Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  int lang_id() const { return 0; }
  int eos_id() const { return 1; }
  int size() const { return static_cast<int>(subwords_.size()); }
  const std::vector<std::string>& subwords() const { return subwords_; }
  const std::string& piece(int id) const { return subwords_.at(static_cast<std::size_t>(id)); }
  std::optional<int> Find(std::string_view piece) const;
  std::size_t max_piece_length() const { return max_len_; }

 private:
  std::vector<std::string> subwords_;
  std::unordered_map<std::string, int> by_piece_;
  std::size_t max_len_ = 0;
};

enum class LabelMode { kWord, kSubword, kSubwordUnk };

std::string_view ToString(LabelMode mode);
std::optional<LabelMode> ParseLabelMode(std::string_view s);

struct CtcLabels {
  std::vector<int> ids;
  LabelMode mode = LabelMode::kSubwordUnk;
};

/// Greedy longest match, left to right, each whitespace-separated word
/// tokenized on its own. Returns one id list per word.
std::vector<std::vector<int>> TokenizeWords(std::string_view text, const SubwordVocab& vocab);

/// Flattened TokenizeWords.
std::vector<int> TokenizeSubwords(std::string_view text, const SubwordVocab& vocab);

/// Inverse of TokenizeWords: pieces concatenated, words joined by one space.
std::string Detokenize(const std::vector<std::vector<int>>& words, const SubwordVocab& vocab);

/// <lang> + subword ids + </s>; the text-branch input sequence.
std::vector<int> EncodeSource(std::string_view text, const SubwordVocab& vocab);

CtcLabels BuildCtcLabels(std::string_view text, LabelMode mode, const LetterVocab& letters,
                         const SubwordVocab& subwords);

std::string ToUpper(std::string_view text);

}  // namespace zeroswot
