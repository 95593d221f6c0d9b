// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace zeroswot::cli {

inline constexpr double kGradCheckTolerance = 1e-4;

struct GradCheckRow {
  std::string op;
  double max_rel_error = 0.0;
  std::size_t elements = 0;
  int seeds = 0;
};

/// Finite-difference checks of the differentiable building blocks and losses,
/// each repeated over `seeds` random draws starting at `seed`.
std::vector<GradCheckRow> RunGradCheckSuite(std::uint64_t seed, int seeds);

/// Only the four composite losses: ctc_loss, wasserstein_loss,
/// subword_encode, total_loss.
std::vector<GradCheckRow> RunLossGradChecks(std::uint64_t seed, int seeds);

}  // namespace zeroswot::cli
