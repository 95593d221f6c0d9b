// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "zeroswot/error.hpp"

namespace zeroswot {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kEmptyLabels: return "EmptyLabels";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kUnknownTokenId: return "UnknownTokenId";
    case ErrorCode::kInputTooShort: return "InputTooShort";
    case ErrorCode::kEmptyCompressedInput: return "EmptyCompressedInput";
    case ErrorCode::kNoCharacters: return "NoCharacters";
    case ErrorCode::kNoChunks: return "NoChunks";
    case ErrorCode::kWidthMismatch: return "WidthMismatch";
    case ErrorCode::kTapMismatch: return "TapMismatch";
    case ErrorCode::kMissingExample: return "MissingExample";
    case ErrorCode::kManifestMismatch: return "ManifestMismatch";
    case ErrorCode::kBadFractions: return "BadFractions";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kFormat: return "Format";
  }
  return "Unknown";
}

namespace {

std::size_t Product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : shape_{rows, cols}, values_(rows * cols, fill), rows_(rows), cols_(cols) {}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)) {
  values_.assign(Product(shape_), fill);
  cols_ = shape_.empty() ? 1 : shape_.back();
  rows_ = shape_.empty() ? 1 : values_.size() / std::max<std::size_t>(cols_, 1);
}

Tensor Tensor::FromValues(std::size_t rows, std::size_t cols,
                          std::vector<double> values) {
  return WithShape({rows, cols}, std::move(values));
}

Tensor Tensor::WithShape(std::vector<std::size_t> shape,
                         std::vector<double> values) {
  if (Product(shape) != values.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "value count does not match shape product");
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.values_ = std::move(values);
  t.cols_ = t.shape_.empty() ? 1 : t.shape_.back();
  t.rows_ = t.shape_.empty() ? 1 : t.values_.size() / std::max<std::size_t>(t.cols_, 1);
  return t;
}


double Tensor::item() const {
  if (values_.size() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "item() on " + ShapeString());
  }
  return values_[0];
}

void Tensor::Fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Tensor::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Tensor::ShapeString() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

}  // namespace zeroswot
