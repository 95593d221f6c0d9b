// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "zeroswot/error.hpp"

namespace zeroswot {
namespace {

std::vector<std::string> ReadLines(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot open vocabulary " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(is, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void WriteLines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot write vocabulary " + path.string());
  for (const auto& l : lines) os << l << '\n';
}

std::vector<std::string_view> SplitWords(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) words.push_back(text.substr(i, j - i));
    i = j;
  }
  return words;
}

}  // namespace

std::string ToUpper(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

LetterVocab LetterVocab::FromLetters(std::string_view letters) {
  std::vector<std::string> symbols = {std::string(kBlankSymbol), std::string(kUnkSymbol),
                                      std::string(kSepSymbol)};
  for (char c : letters) symbols.emplace_back(1, c);
  return FromSymbols(std::move(symbols));
}

LetterVocab LetterVocab::FromSymbols(std::vector<std::string> symbols) {
  if (symbols.size() < 4 || symbols[0] != kBlankSymbol || symbols[1] != kUnkSymbol ||
      symbols[2] != kSepSymbol) {
    throw Error(ErrorCode::kFormat,
                "letter vocabulary needs <blank>, <unk>, <sep> first and at least one letter");
  }
  LetterVocab v;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (!seen.insert(symbols[i]).second) {
      throw Error(ErrorCode::kFormat, "duplicate letter symbol " + symbols[i]);
    }
    if (i >= 3) {
      if (symbols[i].size() != 1) {
        throw Error(ErrorCode::kFormat, "letter symbols must be one character: " + symbols[i]);
      }
      v.by_char_[symbols[i][0]] = static_cast<int>(i);
    }
  }
  v.symbols_ = std::move(symbols);
  return v;
}

LetterVocab LetterVocab::Load(const std::filesystem::path& path) {
  return FromSymbols(ReadLines(path));
}

void LetterVocab::Save(const std::filesystem::path& path) const { WriteLines(path, symbols_); }

std::optional<int> LetterVocab::Find(char c) const {
  auto it = by_char_.find(c);
  if (it == by_char_.end()) return std::nullopt;
  return it->second;
}

SubwordVocab SubwordVocab::Create(std::vector<std::string> pieces, std::string_view alphabet) {
  SubwordVocab v;
  v.subwords_ = {std::string(kLangSymbol), std::string(kEosSymbol)};
  for (auto& p : pieces) {
    if (p.empty()) throw Error(ErrorCode::kFormat, "empty subword");
    if (p == kLangSymbol || p == kEosSymbol) {
      throw Error(ErrorCode::kFormat, "specials are added implicitly");
    }
    v.subwords_.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < v.subwords_.size(); ++i) {
    if (!v.by_piece_.emplace(v.subwords_[i], static_cast<int>(i)).second) {
      throw Error(ErrorCode::kFormat, "duplicate subword " + v.subwords_[i]);
    }
    if (i >= 2) v.max_len_ = std::max(v.max_len_, v.subwords_[i].size());
  }
  for (char c : alphabet) {
    if (!v.by_piece_.contains(std::string(1, c))) {
      throw Error(ErrorCode::kFormat, std::string("alphabet character '") + c +
                                          "' has no one-character subword");
    }
  }
  return v;
}

SubwordVocab SubwordVocab::Load(const std::filesystem::path& path) {
  auto lines = ReadLines(path);
  if (lines.size() < 3 || lines[0] != kLangSymbol || lines[1] != kEosSymbol) {
    throw Error(ErrorCode::kFormat, "subword vocabulary must start with <lang>, </s>");
  }
  lines.erase(lines.begin(), lines.begin() + 2);
  return Create(std::move(lines), "");
}

void SubwordVocab::Save(const std::filesystem::path& path) const { WriteLines(path, subwords_); }

std::optional<int> SubwordVocab::Find(std::string_view piece) const {
  auto it = by_piece_.find(std::string(piece));
  if (it == by_piece_.end() || it->second < 2) return std::nullopt;
  return it->second;
}

std::string_view ToString(LabelMode mode) {
  switch (mode) {
    case LabelMode::kWord: return "word";
    case LabelMode::kSubword: return "subword";
    case LabelMode::kSubwordUnk: return "subword_unk";
  }
  return "unknown";
}

std::optional<LabelMode> ParseLabelMode(std::string_view s) {
  if (s == "word") return LabelMode::kWord;
  if (s == "subword") return LabelMode::kSubword;
  if (s == "subword_unk") return LabelMode::kSubwordUnk;
  return std::nullopt;
}

std::vector<std::vector<int>> TokenizeWords(std::string_view text, const SubwordVocab& vocab) {
  const auto words = SplitWords(text);
  if (words.empty()) throw Error(ErrorCode::kEmptyText, "nothing to tokenize");
  std::vector<std::vector<int>> out;
  for (std::string_view word : words) {
    std::vector<int> ids;
    std::size_t pos = 0;
    while (pos < word.size()) {
      std::size_t len = std::min(vocab.max_piece_length(), word.size() - pos);
      std::optional<int> hit;
      for (; len > 0; --len) {
        if ((hit = vocab.Find(word.substr(pos, len)))) break;
      }
      if (!hit) {
        throw Error(ErrorCode::kUnknownTokenId,
                    "character '" + std::string(1, word[pos]) + "' is not tokenizable");
      }
      ids.push_back(*hit);
      pos += len;
    }
    out.push_back(std::move(ids));
  }
  return out;
}

std::vector<int> TokenizeSubwords(std::string_view text, const SubwordVocab& vocab) {
  std::vector<int> flat;
  for (const auto& w : TokenizeWords(text, vocab)) flat.insert(flat.end(), w.begin(), w.end());
  return flat;
}

std::string Detokenize(const std::vector<std::vector<int>>& words, const SubwordVocab& vocab) {
  std::string out;
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (w) out += ' ';
    for (int id : words[w]) out += vocab.piece(id);
  }
  return out;
}

std::vector<int> EncodeSource(std::string_view text, const SubwordVocab& vocab) {
  std::vector<int> ids = {vocab.lang_id()};
  const auto body = TokenizeSubwords(text, vocab);
  ids.insert(ids.end(), body.begin(), body.end());
  ids.push_back(vocab.eos_id());
  return ids;
}

CtcLabels BuildCtcLabels(std::string_view text, LabelMode mode, const LetterVocab& letters,
                         const SubwordVocab& subwords) {
  if (SplitWords(text).empty()) throw Error(ErrorCode::kEmptyText, "empty transcription");
  const std::string upper = ToUpper(text);
  CtcLabels labels;
  labels.mode = mode;

  auto emit_unit = [&](std::string_view unit, bool keep_unknown) {
    std::size_t before = labels.ids.size();
    for (char c : unit) {
      if (auto id = letters.Find(c)) {
        labels.ids.push_back(*id);
      } else if (keep_unknown) {
        labels.ids.push_back(letters.unk_id());
      }
    }
    // Units that filter down to nothing get no separator.
    if (labels.ids.size() > before) labels.ids.push_back(letters.sep_id());
  };

  if (mode == LabelMode::kWord) {
    for (std::string_view word : SplitWords(upper)) emit_unit(word, false);
  } else {
    for (const auto& word : TokenizeWords(upper, subwords)) {
      for (int id : word) emit_unit(subwords.piece(id), mode == LabelMode::kSubwordUnk);
    }
  }
  if (labels.ids.empty()) {
    throw Error(ErrorCode::kEmptyLabels, "no CTC labels left after filtering");
  }
  return labels;
}

}  // namespace zeroswot
