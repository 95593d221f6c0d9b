// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/autodiff.hpp"

#include "zeroswot/error.hpp"

namespace zeroswot {

Tensor& GradientSet::For(const Parameter& p) {
  auto it = grads_.find(&p);
  if (it == grads_.end()) {
    it = grads_.emplace(&p, Tensor(p.value.shape())).first;
  }
  return it->second;
}

const Tensor* GradientSet::Find(const Parameter& p) const {
  auto it = grads_.find(&p);
  return it == grads_.end() ? nullptr : &it->second;
}

void GradientSet::Add(const GradientSet& other) {
  for (const auto& [param, g] : other.grads_) {
    Tensor& dst = For(*param);
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  }
}

void GradientSet::Scale(double s) {
  for (auto& [param, g] : grads_) {
    for (double& v : g.values()) v *= s;
  }
}

Var Graph::Push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Graph::Constant(Tensor t) {
  Node n;
  n.value = std::move(t);
  return Push(std::move(n));
}

Var Graph::Input(Tensor t) {
  Node n;
  n.value = std::move(t);
  n.requires_grad = record_;
  return Push(std::move(n));
}

Var Graph::Param(const Parameter& p) {
  Node n;
  n.value = p.value;
  n.param = &p;
  n.requires_grad = record_ && !p.frozen;
  return Push(std::move(n));
}

Var Graph::Make(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return Make(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
              std::move(fn));
}

Var Graph::Make(Tensor value, std::span<const Var> inputs, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  if (record_) {
    for (const Var& v : inputs) {
      n.inputs.push_back(v.id);
      n.requires_grad = n.requires_grad || nodes_[v.id].requires_grad;
    }
    if (n.requires_grad) n.backward = std::move(fn);
  }
  return Push(std::move(n));
}

const Tensor& Graph::grad(Var v) const { return nodes_[v.id].grad; }

void Graph::Backward(Var scalar) {
  if (!record_) throw Error(ErrorCode::kShapeMismatch, "graph is not recording");
  Node& root = nodes_[scalar.id];
  if (root.value.size() != 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "Backward() needs a scalar, got " + root.value.ShapeString());
  }
  if (!root.requires_grad) return;
  root.grad = Tensor(root.value.shape(), 1.0);

  std::vector<const Tensor*> in;
  std::vector<Tensor*> din;
  for (std::size_t id = scalar.id + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.backward || node.grad.empty()) continue;
    in.clear();
    din.clear();
    for (std::uint32_t k : node.inputs) {
      Node& src = nodes_[k];
      in.push_back(&src.value);
      if (src.requires_grad) {
        if (src.grad.empty()) src.grad = Tensor(src.value.shape());
        din.push_back(&src.grad);
      } else {
        din.push_back(nullptr);
      }
    }
    node.backward(BackwardContext{node.value, node.grad, in, din});
  }
}

void Graph::CollectParamGrads(GradientSet& out) const {
  for (const Node& node : nodes_) {
    if (node.param == nullptr || !node.requires_grad || node.grad.empty()) continue;
    Tensor& dst = out.For(*node.param);
    for (std::size_t i = 0; i < node.grad.size(); ++i) dst[i] += node.grad[i];
  }
}

}  // namespace zeroswot
