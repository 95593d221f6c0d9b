// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace zeroswot {

/// Dense row-major float64 array. Almost everything in the library is rank 2
/// (rows x cols); vectors are stored as 1 x n.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);

  static Tensor FromValues(std::size_t rows, std::size_t cols,
                           std::vector<double> values);
  static Tensor WithShape(std::vector<std::size_t> shape,
                          std::vector<double> values);
  static Tensor Scalar(double v) { return FromValues(1, 1, {v}); }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double item() const;

  void Fill(double v);
  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }
  bool AllFinite() const;
  std::string ShapeString() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
  std::size_t rows_ = 1;
  std::size_t cols_ = 0;
};

/// Named model weight. Frozen parameters never change under an optimizer step.
struct Parameter {
  std::string name;
  Tensor value;
  bool frozen = false;
};

}  // namespace zeroswot
