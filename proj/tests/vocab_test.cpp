// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "zeroswot/error.hpp"
#include "zeroswot/vocab.hpp"

namespace zeroswot {
namespace {

constexpr std::string_view kAlphabet = "ACDEHILMNORSTU";

LetterVocab Letters() { return LetterVocab::FromLetters(kAlphabet); }

SubwordVocab Subwords() {
  std::vector<std::string> pieces = {"RAND", "OM", "SENT", "ENCE", "."};
  for (char c : kAlphabet) pieces.emplace_back(1, c);
  return SubwordVocab::Create(pieces, kAlphabet);
}

std::vector<std::string> Pieces(const std::vector<int>& ids, const SubwordVocab& v) {
  std::vector<std::string> out;
  for (int id : ids) out.push_back(v.piece(id));
  return out;
}

std::string Spell(const CtcLabels& labels, const LetterVocab& v) {
  std::string out;
  for (int id : labels.ids) {
    if (!out.empty()) out += ' ';
    out += v.symbol(id);
  }
  return out;
}

TEST(LetterVocabTest, SpecialsLeadAndAreDistinct) {
  const LetterVocab v = Letters();
  EXPECT_EQ(v.blank_id(), 0);
  EXPECT_EQ(v.symbol(v.blank_id()), kBlankSymbol);
  EXPECT_EQ(v.symbol(v.unk_id()), kUnkSymbol);
  EXPECT_EQ(v.symbol(v.sep_id()), kSepSymbol);
  EXPECT_NE(v.unk_id(), v.sep_id());
  EXPECT_EQ(v.size(), 3 + static_cast<int>(kAlphabet.size()));
  EXPECT_EQ(v.Find('A'), 3);
  EXPECT_FALSE(v.Find('.').has_value());
}

TEST(LetterVocabTest, RejectsDuplicatesAndMisplacedSpecials) {
  EXPECT_THROW(LetterVocab::FromLetters("AA"), Error);
  EXPECT_THROW(LetterVocab::FromSymbols({"<unk>", "<blank>", "<sep>", "A"}), Error);
}

TEST(SubwordVocabTest, RequiresEveryAlphabetCharacter) {
  EXPECT_THROW(SubwordVocab::Create({"AB", "A"}, "AB"), Error);
  EXPECT_THROW(SubwordVocab::Create({"A", "A"}, "A"), Error);
  EXPECT_THROW(SubwordVocab::Create({"</s>", "A"}, "A"), Error);
  EXPECT_NO_THROW(SubwordVocab::Create({"AB", "A", "B"}, "AB"));
}

TEST(SubwordVocabTest, FileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "zeroswot_vocab_test";
  std::filesystem::create_directories(dir);
  const SubwordVocab sw = Subwords();
  sw.Save(dir / "sw.vocab");
  EXPECT_EQ(SubwordVocab::Load(dir / "sw.vocab").subwords(), sw.subwords());
  const LetterVocab lv = Letters();
  lv.Save(dir / "lv.vocab");
  EXPECT_EQ(LetterVocab::Load(dir / "lv.vocab").symbols(), lv.symbols());
  std::filesystem::remove_all(dir);
}

TEST(TokenizeTest, GreedyLongestMatch) {
  const SubwordVocab v = Subwords();
  EXPECT_EQ(Pieces(TokenizeSubwords("RANDOM SENTENCE.", v), v),
            (std::vector<std::string>{"RAND", "OM", "SENT", "ENCE", "."}));
  EXPECT_EQ(Pieces(TokenizeSubwords("A", v), v), std::vector<std::string>{"A"});

  const SubwordVocab ab = SubwordVocab::Create({"AB", "A", "B"}, "AB");
  EXPECT_EQ(Pieces(TokenizeSubwords("AB", ab), ab), std::vector<std::string>{"AB"});
  EXPECT_EQ(Pieces(TokenizeSubwords("BA", ab), ab), (std::vector<std::string>{"B", "A"}));
}

TEST(TokenizeTest, EmptyTextAndUntokenizable) {
  const SubwordVocab v = Subwords();
  try {
    TokenizeSubwords("   ", v);
    FAIL() << "expected EmptyText";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyText);
  }
  EXPECT_THROW(TokenizeSubwords("XYZ", v), Error);
}

TEST(TokenizeTest, DetokenizeReconstructsText) {
  const SubwordVocab v = Subwords();
  for (const char* text : {"RANDOM SENTENCE.", "MELON", "LEMON SALMON CASTLE."}) {
    EXPECT_EQ(Detokenize(TokenizeWords(text, v), v), text);
  }
}

TEST(TokenizeTest, EncodeSourceAddsSpecials) {
  const SubwordVocab v = Subwords();
  const auto ids = EncodeSource("RANDOM", v);
  ASSERT_EQ(ids.size(), 4u);
  EXPECT_EQ(ids.front(), v.lang_id());
  EXPECT_EQ(ids.back(), v.eos_id());
}

TEST(CtcLabelsTest, WordMode) {
  const LetterVocab lv = Letters();
  const auto labels = BuildCtcLabels("RANDOM SENTENCE.", LabelMode::kWord, lv, Subwords());
  EXPECT_EQ(Spell(labels, lv), "R A N D O M <sep> S E N T E N C E <sep>");
}

TEST(CtcLabelsTest, SubwordUnkMode) {
  const LetterVocab lv = Letters();
  const auto labels = BuildCtcLabels("RANDOM SENTENCE.", LabelMode::kSubwordUnk, lv, Subwords());
  EXPECT_EQ(Spell(labels, lv),
            "R A N D <sep> O M <sep> S E N T <sep> E N C E <sep> <unk> <sep>");
  EXPECT_EQ(Spell(BuildCtcLabels("A", LabelMode::kSubwordUnk, lv, Subwords()), lv), "A <sep>");
}

TEST(CtcLabelsTest, SubwordModeDropsUnknownCharacters) {
  const LetterVocab lv = Letters();
  const auto labels = BuildCtcLabels("RANDOM SENTENCE.", LabelMode::kSubword, lv, Subwords());
  EXPECT_EQ(Spell(labels, lv), "R A N D <sep> O M <sep> S E N T <sep> E N C E <sep>");
}

TEST(CtcLabelsTest, LowercaseIsUppercasedFirst) {
  const LetterVocab lv = Letters();
  EXPECT_EQ(BuildCtcLabels("random", LabelMode::kSubwordUnk, lv, Subwords()).ids,
            BuildCtcLabels("RANDOM", LabelMode::kSubwordUnk, lv, Subwords()).ids);
}

TEST(CtcLabelsTest, WordModeEmptyAfterFiltering) {
  try {
    BuildCtcLabels(". .", LabelMode::kWord, Letters(), Subwords());
    FAIL() << "expected EmptyLabels";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyLabels);
  }
}

// Random texts over the alphabet plus punctuation: label invariants hold.
TEST(CtcLabelsTest, InvariantsOnRandomTexts) {
  const LetterVocab lv = Letters();
  const SubwordVocab sw = Subwords();
  const std::string chars = std::string(kAlphabet) + ".";
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, chars.size() - 1);
  std::uniform_int_distribution<int> len(1, 8), words(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const int nw = words(rng);
    for (int w = 0; w < nw; ++w) {
      if (w) text += ' ';
      const int nc = len(rng);
      for (int c = 0; c < nc; ++c) text += chars[pick(rng)];
    }
    const auto labels = BuildCtcLabels(text, LabelMode::kSubwordUnk, lv, sw);
    const auto tokens = TokenizeSubwords(text, sw);
    int seps = 0;
    std::string letters;
    for (int id : labels.ids) {
      ASSERT_NE(id, lv.blank_id());
      if (id == lv.sep_id()) {
        ++seps;
      } else if (id != lv.unk_id()) {
        letters += lv.symbol(id);
      }
    }
    ASSERT_EQ(labels.ids.back(), lv.sep_id());
    EXPECT_EQ(seps, static_cast<int>(tokens.size())) << text;
    std::string expected;
    for (char c : text) {
      if (lv.Find(c)) expected += c;
    }
    EXPECT_EQ(letters, expected) << text;
    EXPECT_EQ(TokenizeSubwords(text, sw), tokens);
  }
}

TEST(LabelModeTest, ParseRoundTrip) {
  for (LabelMode m : {LabelMode::kWord, LabelMode::kSubword, LabelMode::kSubwordUnk}) {
    EXPECT_EQ(ParseLabelMode(ToString(m)), m);
  }
  EXPECT_FALSE(ParseLabelMode("chars").has_value());
}

}  // namespace
}  // namespace zeroswot
