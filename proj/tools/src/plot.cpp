// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>

#include "zeroswot/error.hpp"

namespace zeroswot::cli {
namespace {

using Rgb = std::array<std::uint8_t, 3>;

constexpr Rgb kPalette[] = {{31, 119, 180}, {255, 127, 14}, {44, 160, 44},
                            {214, 39, 40},  {148, 103, 189}, {140, 86, 75}};
constexpr int kMargin = 30;

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w * h), Rgb{255, 255, 255}) {}

  void Set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    px_[static_cast<std::size_t>(y * w_ + x)] = c;
  }

  void Line(int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      Set(x0, y0, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void Rect(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = std::min(y0, y1); y <= std::max(y0, y1); ++y) {
      for (int x = std::min(x0, x1); x <= std::max(x0, x1); ++x) Set(x, y, c);
    }
  }

  void Axes() {
    const Rgb black{0, 0, 0};
    Line(kMargin, h_ - kMargin, w_ - kMargin, h_ - kMargin, black);
    Line(kMargin, kMargin, kMargin, h_ - kMargin, black);
  }

  void Save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    os << "P6\n" << w_ << ' ' << h_ << "\n255\n";
    for (const Rgb& p : px_) os.write(reinterpret_cast<const char*>(p.data()), 3);
  }

  int width() const { return w_; }
  int height() const { return h_; }

 private:
  int w_, h_;
  std::vector<Rgb> px_;
};

}  // namespace

void WriteLinePlot(const std::filesystem::path& path, const std::vector<Series>& series,
                   int width, int height) {
  Canvas canvas(width, height);
  canvas.Axes();
  bool positive = true;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      positive = positive && s.y[i] > 0.0;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
    }
  }
  auto ty = [&](double y) { return positive ? std::log10(y) : y; };
  for (const Series& s : series) {
    for (double y : s.y) {
      if (!std::isfinite(y)) continue;
      ymin = std::min(ymin, ty(y));
      ymax = std::max(ymax, ty(y));
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double pw = width - 2 * kMargin, ph = height - 2 * kMargin;
  auto px = [&](double x) { return kMargin + static_cast<int>(std::lround((x - xmin) / (xmax - xmin) * pw)); };
  auto py = [&](double y) {
    return height - kMargin - static_cast<int>(std::lround((ty(y) - ymin) / (ymax - ymin) * ph));
  };
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const Rgb c = kPalette[k % std::size(kPalette)];
    canvas.Rect(width - kMargin - 12, 8 + 10 * static_cast<int>(k), width - kMargin - 4,
                14 + 10 * static_cast<int>(k), c);
    bool have_prev = false;
    int x0 = 0, y0 = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) {
        have_prev = false;
        continue;
      }
      const int x1 = px(s.x[i]), y1 = py(s.y[i]);
      if (have_prev) {
        canvas.Line(x0, y0, x1, y1, c);
      } else {
        canvas.Set(x1, y1, c);
      }
      x0 = x1;
      y0 = y1;
      have_prev = true;
    }
  }
  canvas.Save(path);
}

void WriteHistogram(const std::filesystem::path& path, const std::vector<double>& values,
                    int bins, int width, int height) {
  Canvas canvas(width, height);
  canvas.Axes();
  if (!values.empty() && bins > 0) {
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
      auto b = static_cast<int>((v - lo) / (hi - lo) * bins);
      ++counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))];
    }
    const int peak = *std::max_element(counts.begin(), counts.end());
    const double bw = static_cast<double>(width - 2 * kMargin) / bins;
    const double ph = height - 2 * kMargin;
    for (int b = 0; b < bins; ++b) {
      const int x0 = kMargin + static_cast<int>(b * bw) + 1;
      const int x1 = kMargin + static_cast<int>((b + 1) * bw) - 1;
      const int top =
          height - kMargin - static_cast<int>(ph * counts[static_cast<std::size_t>(b)] / peak);
      if (counts[static_cast<std::size_t>(b)] > 0) canvas.Rect(x0, top, x1, height - kMargin - 1, kPalette[0]);
    }
  }
  canvas.Save(path);
}

}  // namespace zeroswot::cli
