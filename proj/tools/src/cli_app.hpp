// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>

namespace zeroswot::cli {

/// Parses argv, dispatches one command and returns the process exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Full --help text of the top-level app and every subcommand.
std::string HelpText();

}  // namespace zeroswot::cli
