// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli_app.hpp"

int main(int argc, char** argv) {
  return zeroswot::cli::RunCli(argc, argv, std::cout, std::cerr);
}
