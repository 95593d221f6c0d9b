// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

BENCHMARK_MAIN();
