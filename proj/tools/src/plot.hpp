// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace zeroswot::cli {

struct Series {
  std::string name;
  std::vector<double> x, y;
};

/// Binary PPM line chart; y on a log10 axis when every value is positive.
void WriteLinePlot(const std::filesystem::path& path, const std::vector<Series>& series,
                   int width = 640, int height = 400);

/// Binary PPM histogram with `bins` equal-width bins over the data range.
void WriteHistogram(const std::filesystem::path& path, const std::vector<double>& values,
                    int bins = 20, int width = 640, int height = 400);

}  // namespace zeroswot::cli
