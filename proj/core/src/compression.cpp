// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/compression.hpp"

#include <cmath>

#include "zeroswot/ctc.hpp"
#include "zeroswot/error.hpp"
#include "zeroswot/ops.hpp"

namespace zeroswot {

CharRepr CharCompress(Var a, const Tensor& log_probs, int blank_id) {
  if (a.rows() != log_probs.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "CharCompress: " + a.value().ShapeString() +
                                               " states vs " + log_probs.ShapeString() +
                                               " log-probs");
  }
  const std::vector<int> path = ArgmaxRows(log_probs);
  CharRepr out;
  for (std::size_t t = 0; t < path.size();) {
    std::size_t end = t;
    while (end < path.size() && path[end] == path[t]) ++end;
    if (path[t] != blank_id) {
      std::vector<std::size_t> rows;
      for (std::size_t k = t; k < end; ++k) rows.push_back(k);
      out.groups.push_back(std::move(rows));
      out.labels.push_back(path[t]);
    }
    t = end;
  }
  if (out.groups.empty()) return out;
  out.reprs = ops::GroupMeanRows(a, out.groups);
  out.probs = Tensor(out.groups.size(), log_probs.cols());
  for (std::size_t gi = 0; gi < out.groups.size(); ++gi) {
    for (std::size_t r : out.groups[gi]) {
      for (std::size_t k = 0; k < log_probs.cols(); ++k) out.probs(gi, k) += log_probs(r, k);
    }
    for (std::size_t k = 0; k < log_probs.cols(); ++k) {
      out.probs(gi, k) /= static_cast<double>(out.groups[gi].size());
    }
  }
  return out;
}

ChunkSplit SplitChunks(std::span<const int> labels, int sep_id, bool include_separator) {
  if (labels.empty()) throw Error(ErrorCode::kNoCharacters, "no characters to split");
  ChunkSplit split;
  std::vector<std::size_t> current;
  bool saw_separator = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == sep_id) {
      saw_separator = true;
      if (include_separator && !current.empty()) current.push_back(i);
      if (!current.empty()) split.chunks.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(i);
    }
  }
  if (!current.empty()) split.chunks.push_back(std::move(current));
  split.no_separator = !saw_separator;
  return split;
}

std::string_view ToString(AdapterMode mode) {
  switch (mode) {
    case AdapterMode::kNone: return "none";
    case AdapterMode::kStride4: return "stride4";
    case AdapterMode::kCharOnly: return "char_only";
    case AdapterMode::kSubword: return "subword";
  }
  return "unknown";
}

std::optional<AdapterMode> ParseAdapterMode(std::string_view s) {
  if (s == "none") return AdapterMode::kNone;
  if (s == "stride4") return AdapterMode::kStride4;
  if (s == "char_only") return AdapterMode::kCharOnly;
  if (s == "subword") return AdapterMode::kSubword;
  return std::nullopt;
}

AdaptResult Adapt(Graph& g, Var a, const Tensor& log_probs, AdapterMode mode,
                  const SubwordEncoderParams& params, const AdapterOptions& options) {
  AdaptResult result;
  result.n_frames = a.rows();
  switch (mode) {
    case AdapterMode::kNone:
      result.output = a;
      result.n_char = a.rows();
      return result;
    case AdapterMode::kStride4: {
      std::vector<std::vector<std::size_t>> groups;
      for (std::size_t t = 0; t < a.rows(); t += 4) {
        std::vector<std::size_t> rows;
        for (std::size_t k = t; k < std::min(t + 4, a.rows()); ++k) rows.push_back(k);
        groups.push_back(std::move(rows));
      }
      result.output = ops::GroupMeanRows(a, groups);
      result.n_char = groups.size();
      return result;
    }
    case AdapterMode::kCharOnly: {
      CharRepr cr = CharCompress(a, log_probs, options.blank_id);
      if (!cr.reprs) throw Error(ErrorCode::kNoCharacters, "every frame predicted blank");
      result.output = *cr.reprs;
      result.n_char = cr.size();
      return result;
    }
    case AdapterMode::kSubword:
      break;
  }
  CharRepr cr = CharCompress(a, log_probs, options.blank_id);
  if (!cr.reprs) throw Error(ErrorCode::kNoChunks, "every frame predicted blank");
  result.n_char = cr.size();
  ChunkSplit split = SplitChunks(cr.labels, options.sep_id, options.include_separator);
  if (split.chunks.empty()) throw Error(ErrorCode::kNoChunks, "only separators predicted");
  if (split.no_separator) {
    result.warnings.emplace_back("no separator predicted; using a single chunk");
  }
  std::vector<Var> encoded;
  encoded.reserve(split.chunks.size());
  for (const auto& chunk : split.chunks) {
    std::vector<int> rows(chunk.begin(), chunk.end());
    Var c = ops::GatherRows(*cr.reprs, rows);
    encoded.push_back(SubwordEncode(g, params, c, options.heads));
  }
  result.output = encoded.size() == 1 ? encoded[0] : ops::ConcatRows(encoded);
  return result;
}

LengthGap ComputeLengthGap(std::size_t speech_len, std::size_t text_len) {
  if (text_len == 0) throw Error(ErrorCode::kShapeMismatch, "text length must be >= 1");
  const auto s = static_cast<double>(speech_len);
  const auto t = static_cast<double>(text_len);
  return {std::abs(s - t), s / t};
}

}  // namespace zeroswot
