#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "ddgf/tensor.hpp"

namespace ddgf {

enum class Activation { Relu, Sigmoid, Tanh, Identity };

double activate(Activation kind, double x);
// Derivative expressed in terms of the input x.
double activate_derivative(Activation kind, double x);
std::string_view to_string(Activation kind);
Activation activation_from_string(std::string_view name);

enum class OpKind {
  Leaf,
  Matmul,
  Add,
  Elementwise,
  Mse,
  Slice,
  Concat,
  Hadamard,
  Sum,
  Symmetric,
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while the tape lives and
/// has not been cleared.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Tensor& grad() const;
};

/// Reverse-mode tape. Nodes are appended in evaluation order and may only
/// reference earlier nodes, so the graph is acyclic by construction.
///
/// backward() zeroes every gradient before propagating, so calling it twice on
/// the same graph yields identical gradients.
class Tape {
 public:
  Var leaf(Tensor value);

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  const Tensor& grad(Var v) const { return nodes_.at(v.id).grad; }
  OpKind kind(Var v) const { return nodes_.at(v.id).kind; }
  std::size_t size() const { return nodes_.size(); }

  void backward(Var loss);
  void clear() { nodes_.clear(); }

  // Used by the op implementations.
  using Backprop = std::function<void(Tape&, std::size_t self)>;
  Var push(OpKind kind, Tensor value, std::vector<std::size_t> inputs, Backprop backprop);
  Tensor& grad_mut(std::size_t id) { return nodes_[id].grad; }
  const Tensor& grad_of(std::size_t id) const { return nodes_[id].grad; }
  const Tensor& value_of(std::size_t id) const { return nodes_[id].value; }

 private:
  struct Node {
    OpKind kind;
    Tensor value;
    Tensor grad;
    std::vector<std::size_t> inputs;
    Backprop backprop;
  };
  std::vector<Node> nodes_;
};

namespace ad {

Var matmul(Var a, Var b);
Var add(Var a, Var b);
// x (R x C) plus a 1 x C row added to every row.
Var add_row(Var x, Var row);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var elementwise(Activation kind, Var x);
Var sum(Var x);
// Mean of squared differences over all entries; 1x1.
Var mse(Var prediction, Var target);
Var slice_cols(Var x, std::size_t begin, std::size_t count);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
// Treats x as a vertical stack of blocks with a.rows() rows each and returns
// the stack of a * block. Gradient w.r.t. a sums over blocks.
Var block_matmul(Var a, Var x);
// Builds a symmetric n x n matrix from a 1 x n(n+1)/2 row holding the upper
// triangle (row-major, diagonal included). Each off-diagonal parameter feeds
// both mirrored entries.
Var symmetric_from_upper(Var theta, std::size_t n);

}  // namespace ad

std::size_t upper_triangle_size(std::size_t n);
Tensor symmetric_from_upper(const Tensor& theta, std::size_t n);
Tensor upper_from_symmetric(const Tensor& a);

}  // namespace ddgf
