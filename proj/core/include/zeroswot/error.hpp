// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zeroswot {

enum class ErrorCode {
  kEmptyText,
  kEmptyLabels,
  kShapeMismatch,
  kNonFiniteGradient,
  kUnknownTokenId,
  kInputTooShort,
  kEmptyCompressedInput,
  kNoCharacters,
  kNoChunks,
  kWidthMismatch,
  kTapMismatch,
  kMissingExample,
  kManifestMismatch,
  kBadFractions,
  kConfigInvalid,
  kMissingArtifact,
  kIo,
  kFormat,
};

std::string_view ToString(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ToString(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace zeroswot
