#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gpnet/matrix.hpp"

namespace gpnet::ad {

class Tape;

// One record in the computation graph. Owned by the Tape that created it;
// inputs always have a smaller creation index, so the graph is acyclic and
// a single reverse sweep over the tape is a valid topological order.
struct Node {
  Matrix data;
  Matrix grad;  // persistent, accumulated across backward() calls
  Matrix adj;   // scratch adjoint for the backward pass in flight
  bool requires_grad = false;
  bool has_grad = false;
  bool adj_live = false;
  std::string name;
  std::function<void()> backprop;  // propagates this->adj into the inputs' adj
  Tape* tape = nullptr;
  std::size_t index = 0;
};

// Lightweight handle to a tape node.
class Value {
 public:
  Value() = default;

  const Matrix& data() const { return node_->data; }
  const Matrix& grad() const;
  bool has_grad() const { return node_ && node_->has_grad; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  std::size_t rows() const { return node_->data.rows(); }
  std::size_t cols() const { return node_->data.cols(); }
  bool valid() const { return node_ != nullptr; }

  Node* node() const { return node_; }

 private:
  friend class Tape;
  explicit Value(Node* node) : node_(node) {}
  Node* node_ = nullptr;
};

// Records operations in creation order. backward() replays the records in
// exact reverse creation order, computing adjoints in a per-call scratch
// buffer and then accumulating them into each node's persistent grad, so a
// second backward() without reset doubles every gradient.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Value leaf(Matrix data, bool requires_grad = false, std::string name = {});
  Value constant(Matrix data) { return leaf(std::move(data), false); }

  // loss must be 1x1; gradients of every requires_grad node reachable from
  // it are accumulated (+=) into node.grad.
  void backward(const Value& loss);

  void zero_grad();
  std::size_t size() const { return nodes_.size(); }

  // op implementations only
  Value make(Matrix data, std::vector<Node*> inputs, std::function<void()> backprop);

 private:
  std::vector<std::unique_ptr<Node>> nodes_;
};

namespace detail {
void add_adj(Node* node, const Matrix& contribution);
Tape* tape_of(const Value& v, const char* op);
Tape* tape_of(const Value& a, const Value& b, const char* op);
}  // namespace detail

// --- operations ---------------------------------------------------------
// Backward conventions: relu passes gradient only where the input is
// strictly positive; reduction maxima route gradient to the lowest index on
// ties; elementwise max routes ties to the first operand.

Value matmul(const Value& a, const Value& b);
Value add(const Value& a, const Value& b);  // equal shapes, or b is 1xC broadcast over rows
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);  // elementwise
Value emax(const Value& a, const Value& b);
Value relu(const Value& a);
Value leaky_relu(const Value& a, double slope);
Value exp(const Value& a);
Value log(const Value& a);
Value softmax_rows(const Value& a);
Value concat_cols(const Value& a, const Value& b);
Value concat_rows(std::span<const Value> parts);
Value transpose(const Value& a);
Value mean_over_rows(const Value& a);  // RxC -> 1xC
Value max_over_rows(const Value& a);   // RxC -> 1xC
Value mean_over_cols(const Value& a);  // RxC -> Rx1
Value max_over_cols(const Value& a);   // RxC -> Rx1
Value sum_all(const Value& a);         // 1x1
Value l2_norm(const Value& a);         // 1x1, Frobenius
Value scale(const Value& a, double c);
Value div_by_scalar(const Value& a, const Value& s);  // s is 1x1
Value scale_rows(const Value& a, const Value& s);     // s is Rx1, scales row i by s[i]
Value select_rows(const Value& a, const std::vector<int>& indices);
// Mean over rows of -log softmax(logits)[i, labels[i]]. Fused for stability.
Value cross_entropy_mean(const Value& logits, const std::vector<int>& labels);

}  // namespace gpnet::ad
