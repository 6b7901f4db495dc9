#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "motionauth/errors.hpp"
#include "motionauth/mat.hpp"
#include "motionauth/nn/param.hpp"

namespace motionauth::nn {

template <typename S>
class Graph;

// Lightweight handle into a Graph node. Ops are free functions over Vars.
template <typename S>
struct Var {
  Graph<S>* g = nullptr;
  int id = -1;

  const Mat<S>& value() const { return g->value(id); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
};

// Reverse-mode tape. Nodes are stored in creation order, which is already a
// topological order, so backward() is a single reverse sweep. Each backward()
// call starts from fresh node gradients and *accumulates* the result into the
// bound Params, so two backward() calls double the parameter gradients.
template <typename S>
class Graph {
 public:
  struct Node {
    Mat<S> value;
    Mat<S> grad;  // empty until first accumulation in the current sweep
    bool needs_grad = false;
    std::function<void(Graph&)> backward;
  };

  // Id the next add() will return; lets op closures capture their own node.
  int next_id() const { return int(nodes_.size()); }

  int add(Mat<S> value, bool needs_grad,
          std::function<void(Graph&)> backward = {}) {
    if (finite_checks() && !all_finite(value))
      throw NumericalError("graph node " + std::to_string(nodes_.size()) +
                           ": non-finite value in forward pass");
    nodes_.push_back(Node{std::move(value), Mat<S>(), needs_grad,
                          std::move(backward)});
    return int(nodes_.size()) - 1;
  }

  // Test hook: when enabled, every node value is checked for NaN/Inf.
  static bool& finite_checks() {
    static bool enabled = false;
    return enabled;
  }

  Var<S> constant(Mat<S> v) { return {this, add(std::move(v), false)}; }

  // A differentiable leaf that is not a parameter (used by gradient checks).
  Var<S> leaf(Mat<S> v) { return {this, add(std::move(v), true)}; }

  Var<S> param(Param<S>& p) {
    int id = add(p.value, p.trainable);
    if (p.trainable) bindings_.emplace_back(id, &p);
    return {this, id};
  }

  const Mat<S>& value(int id) const { return nodes_[std::size_t(id)].value; }
  Mat<S>& value_mut(int id) { return nodes_[std::size_t(id)].value; }
  bool needs_grad(int id) const { return nodes_[std::size_t(id)].needs_grad; }

  // Gradient buffer for a node, zero-initialized on first touch per sweep.
  Mat<S>& grad(int id) {
    Node& n = nodes_[std::size_t(id)];
    if (n.grad.size() == 0 && n.value.size() > 0)
      n.grad = Mat<S>::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  void accumulate(int id, const Mat<S>& g) {
    if (nodes_[std::size_t(id)].needs_grad) grad(id) += g;
  }

  const Mat<S>& grad_of(Var<S> v) { return grad(v.id); }

  void backward(Var<S> loss) {
    if (loss.g != this) throw ShapeError("backward: loss from another graph");
    const Mat<S>& lv = value(loss.id);
    if (lv.rows() != 1 || lv.cols() != 1)
      throw ShapeError("backward: loss must be scalar, got " + shape_str(lv));
    for (auto& n : nodes_) n.grad.resize(0, 0);
    grad(loss.id).setConstant(S(1));
    for (int id = loss.id; id >= 0; --id) {
      Node& n = nodes_[std::size_t(id)];
      if (n.grad.size() == 0 || !n.backward) continue;
      n.backward(*this);
    }
    for (auto& [id, p] : bindings_) {
      Node& n = nodes_[std::size_t(id)];
      if (n.grad.size() > 0) p->grad += n.grad;
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<Node> nodes_;
  std::vector<std::pair<int, Param<S>*>> bindings_;
};

}  // namespace motionauth::nn
