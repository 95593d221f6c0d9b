// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zeroswot/autodiff.hpp"
#include "zeroswot/encoder.hpp"

namespace zeroswot {

/// Character-level representation: frames grouped by runs of the same greedy
/// CTC label, blanks dropped. `reprs` is unset when every frame is blank.
struct CharRepr {
  std::optional<Var> reprs;                      // n_char x d
  std::vector<int> labels;                       // n_char, no blanks
  Tensor probs;                                  // n_char x |V| mean-pooled log-probs
  std::vector<std::vector<std::size_t>> groups;  // source frame rows per character

  std::size_t size() const { return labels.size(); }
};

CharRepr CharCompress(Var a, const Tensor& log_probs, int blank_id = 0);

struct ChunkSplit {
  std::vector<std::vector<std::size_t>> chunks;  // rows of the CharRepr per chunk
  bool no_separator = false;                     // whole sequence became one chunk
};

/// Splits character positions at separators. Separator rows are dropped
/// unless `include_separator`, in which case they close the preceding chunk.
/// Empty spans are skipped. kNoCharacters on an empty input.
ChunkSplit SplitChunks(std::span<const int> labels, int sep_id, bool include_separator = false);

enum class AdapterMode { kNone, kStride4, kCharOnly, kSubword };

std::string_view ToString(AdapterMode mode);
std::optional<AdapterMode> ParseAdapterMode(std::string_view s);

struct AdapterOptions {
  int blank_id = 0;
  int sep_id = 2;
  bool include_separator = false;
  int heads = 4;
};

struct AdaptResult {
  Var output;           // n_sw x d
  std::size_t n_frames = 0;
  std::size_t n_char = 0;
  std::vector<std::string> warnings;
};

/// Runs one of the compression variants over acoustic states `a` (n x d)
/// given CTC log-probs `log_probs` (n x |V|). Subword mode raises kNoChunks
/// when no chunk survives; char-only raises kNoCharacters when every frame is
/// blank.
AdaptResult Adapt(Graph& g, Var a, const Tensor& log_probs, AdapterMode mode,
                  const SubwordEncoderParams& params, const AdapterOptions& options);

struct LengthGap {
  double abs_diff = 0.0;
  double ratio = 0.0;
};

LengthGap ComputeLengthGap(std::size_t speech_len, std::size_t text_len);

}  // namespace zeroswot
