// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace zeroswot::cli {

struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path run_dir = "run";
  std::vector<std::string> ablations;
};

struct AverageOptions {
  int k = 0;  // 0: train.avg_best_k
  std::filesystem::path output;
  std::vector<std::filesystem::path> inputs;
};

struct GradCheckOptions {
  int seeds = 20;
};

void GenData(const GlobalOptions& opts, std::ostream& log);
void TrainMt(const GlobalOptions& opts, std::ostream& log);
void TrainSpeech(const GlobalOptions& opts, std::ostream& log);
void EvalSt(const GlobalOptions& opts, std::ostream& log);
void EvalRetrieval(const GlobalOptions& opts, std::ostream& log);
void EvalLengths(const GlobalOptions& opts, std::ostream& log);
/// Returns false when any check exceeds the tolerance.
bool GradCheckCommand(const GlobalOptions& opts, const GradCheckOptions& gc, std::ostream& out);
void AverageCkpt(const GlobalOptions& opts, const AverageOptions& avg, std::ostream& log);
void Report(const GlobalOptions& opts, std::ostream& log);

/// Maps an exception to the process exit code: 1 for validation failures
/// (bad config, missing prerequisites), 2 for runtime errors.
int ExitCodeFor(const std::exception& e);

}  // namespace zeroswot::cli
