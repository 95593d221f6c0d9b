// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "zeroswot/tensor.hpp"

namespace zeroswot {

class Graph;

/// Handle to a node on a Graph tape. Cheap to copy; only valid while the
/// owning Graph is alive.
struct Var {
  Graph* graph = nullptr;
  std::uint32_t id = 0;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

/// What a backward rule sees. `din[k]` is null when input k does not need a
/// gradient; otherwise the rule must accumulate (+=) into it.
struct BackwardContext {
  const Tensor& out;
  const Tensor& dout;
  std::span<const Tensor* const> in;
  std::span<Tensor* const> din;
};
using BackwardFn = std::function<void(const BackwardContext&)>;

/// Gradients keyed by parameter. Summed across examples in a fixed order so
/// that multi-threaded batches stay bit-reproducible.
class GradientSet {
 public:
  Tensor& For(const Parameter& p);
  const Tensor* Find(const Parameter& p) const;
  void Add(const GradientSet& other);
  void Scale(double s);
  void Clear() { grads_.clear(); }
  std::size_t size() const { return grads_.size(); }

 private:
  std::map<const Parameter*, Tensor> grads_;
};

/// Reverse-mode tape. Every op appends one node holding its forward value and
/// a backward rule; Backward() walks the tape in reverse.
class Graph {
 public:
  explicit Graph(bool record = true) : record_(record) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool recording() const { return record_; }

  Var Constant(Tensor t);
  Var Input(Tensor t);  // leaf that requires a gradient
  Var Param(const Parameter& p);
  Var Make(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var Make(Tensor value, std::span<const Var> inputs, BackwardFn fn);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Seeds d(scalar)/d(scalar) = 1 and propagates.
  void Backward(Var scalar);
  /// Adds gradients of every trainable parameter leaf into `out`.
  void CollectParamGrads(GradientSet& out) const;

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<std::uint32_t> inputs;
    BackwardFn backward;
    const Parameter* param = nullptr;
    bool requires_grad = false;
  };

  Var Push(Node node);

  std::deque<Node> nodes_;  // stable addresses: values are borrowed across pushes
  bool record_;
};

inline const Tensor& Var::value() const { return graph->value(*this); }

}  // namespace zeroswot
