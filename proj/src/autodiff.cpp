#include "gpnet/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gpnet/error.hpp"

namespace gpnet::ad {

namespace detail {

void add_adj(Node* node, const Matrix& contribution) {
  if (!node->adj_live) {
    node->adj = contribution;
    node->adj_live = true;
  } else {
    node->adj += contribution;
  }
}

Tape* tape_of(const Value& v, const char* op) {
  if (!v.valid()) throw ContractError(std::string(op) + ": empty value");
  return v.node()->tape;
}

Tape* tape_of(const Value& a, const Value& b, const char* op) {
  Tape* t = tape_of(a, op);
  if (t != tape_of(b, op)) {
    throw ContractError(std::string(op) + ": operands belong to different tapes");
  }
  return t;
}

}  // namespace detail

using detail::add_adj;
using detail::tape_of;

const Matrix& Value::grad() const {
  if (!node_ || !node_->has_grad) {
    throw ContractError("Value::grad: no gradient computed for '" +
                        (node_ ? node_->name : std::string("<null>")) + "'");
  }
  return node_->grad;
}

Value Tape::leaf(Matrix data, bool requires_grad, std::string name) {
  auto node = std::make_unique<Node>();
  node->data = std::move(data);
  node->requires_grad = requires_grad;
  node->name = std::move(name);
  node->tape = this;
  node->index = nodes_.size();
  Node* raw = node.get();
  nodes_.push_back(std::move(node));
  return Value(raw);
}

Value Tape::make(Matrix data, std::vector<Node*> inputs, std::function<void()> backprop) {
  bool needs_grad = false;
  for (Node* in : inputs) needs_grad = needs_grad || in->requires_grad;
  auto node = std::make_unique<Node>();
  node->data = std::move(data);
  node->requires_grad = needs_grad;
  if (needs_grad) node->backprop = std::move(backprop);
  node->tape = this;
  node->index = nodes_.size();
  Node* raw = node.get();
  nodes_.push_back(std::move(node));
  return Value(raw);
}

void Tape::backward(const Value& loss) {
  Node* root = loss.node();
  if (!root || root->tape != this) {
    throw ContractError("backward: loss does not belong to this tape");
  }
  if (root->data.rows() != 1 || root->data.cols() != 1) {
    throw ContractError("backward: loss must be scalar (1x1), got " + root->data.shape_str());
  }
  for (std::size_t i = 0; i <= root->index; ++i) nodes_[i]->adj_live = false;

  root->adj = Matrix(1, 1, 1.0);
  root->adj_live = true;
  for (std::size_t i = root->index + 1; i-- > 0;) {
    Node* n = nodes_[i].get();
    if (n->adj_live && n->backprop) n->backprop();
  }
  for (std::size_t i = 0; i <= root->index; ++i) {
    Node* n = nodes_[i].get();
    if (n->requires_grad && n->adj_live) {
      if (!n->has_grad) {
        n->grad = n->adj;
        n->has_grad = true;
      } else {
        n->grad += n->adj;
      }
    }
  }
}

void Tape::zero_grad() {
  for (auto& n : nodes_) {
    n->has_grad = false;
    n->grad = Matrix();
  }
}

// --- op helpers ----------------------------------------------------------

namespace {

void require_same_shape(const Value& a, const Value& b, const char* op) {
  if (!a.data().same_shape(b.data())) {
    throw ShapeError(std::string(op) + ": shape mismatch: " + a.data().shape_str() + " vs " +
                     b.data().shape_str());
  }
}

bool row_broadcastable(const Value& a, const Value& b) {
  return b.rows() == 1 && b.cols() == a.cols() && a.rows() > 1;
}

Matrix col_sums(const Matrix& g) {
  Matrix out(1, g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) out(0, j) += g(i, j);
  return out;
}

// Every op needs a backprop closure that reads the adjoint of the node it is
// about to create. make_op creates the node first, then binds the closure.
template <typename Fn>
Value make_op(Tape* t, Matrix data, const std::vector<Node*>& inputs, Fn&& bind_backprop) {
  Value out = t->make(std::move(data), inputs, nullptr);
  Node* self = out.node();
  if (self->requires_grad) self->backprop = bind_backprop(self);
  return out;
}

}  // namespace

// --- operations ----------------------------------------------------------

Value matmul(const Value& a, const Value& b) {
  Tape* t = tape_of(a, b, "matmul");
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ: " + a.data().shape_str() + " vs " +
                     b.data().shape_str());
  }
  Node* an = a.node();
  Node* bn = b.node();
  return make_op(t, gpnet::matmul(a.data(), b.data()), {an, bn}, [an, bn](Node* self) {
    return [an, bn, self]() {
      if (an->requires_grad) add_adj(an, matmul_nt(self->adj, bn->data));
      if (bn->requires_grad) add_adj(bn, matmul_tn(an->data, self->adj));
    };
  });
}

Value add(const Value& a, const Value& b) {
  Tape* t = tape_of(a, b, "add");
  Node* an = a.node();
  Node* bn = b.node();
  if (a.data().same_shape(b.data())) {
    return make_op(t, a.data() + b.data(), {an, bn}, [an, bn](Node* self) {
      return [an, bn, self]() {
        if (an->requires_grad) add_adj(an, self->adj);
        if (bn->requires_grad) add_adj(bn, self->adj);
      };
    });
  }
  if (row_broadcastable(a, b)) {
    Matrix out = a.data();
    for (std::size_t i = 0; i < out.rows(); ++i)
      for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += b.data()(0, j);
    return make_op(t, std::move(out), {an, bn}, [an, bn](Node* self) {
      return [an, bn, self]() {
        if (an->requires_grad) add_adj(an, self->adj);
        if (bn->requires_grad) add_adj(bn, col_sums(self->adj));
      };
    });
  }
  throw ShapeError("add: shape mismatch: " + a.data().shape_str() + " vs " +
                   b.data().shape_str());
}

Value sub(const Value& a, const Value& b) {
  Tape* t = tape_of(a, b, "sub");
  require_same_shape(a, b, "sub");
  Node* an = a.node();
  Node* bn = b.node();
  return make_op(t, a.data() - b.data(), {an, bn}, [an, bn](Node* self) {
    return [an, bn, self]() {
      if (an->requires_grad) add_adj(an, self->adj);
      if (bn->requires_grad) add_adj(bn, self->adj * -1.0);
    };
  });
}

Value mul(const Value& a, const Value& b) {
  Tape* t = tape_of(a, b, "mul");
  require_same_shape(a, b, "mul");
  Node* an = a.node();
  Node* bn = b.node();
  return make_op(t, hadamard(a.data(), b.data()), {an, bn}, [an, bn](Node* self) {
    return [an, bn, self]() {
      if (an->requires_grad) add_adj(an, hadamard(self->adj, bn->data));
      if (bn->requires_grad) add_adj(bn, hadamard(self->adj, an->data));
    };
  });
}

Value emax(const Value& a, const Value& b) {
  Tape* t = tape_of(a, b, "emax");
  require_same_shape(a, b, "emax");
  Node* an = a.node();
  Node* bn = b.node();
  Matrix out = a.data();
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = std::max(a.data().data()[i], b.data().data()[i]);
  return make_op(t, std::move(out), {an, bn}, [an, bn](Node* self) {
    return [an, bn, self]() {
      Matrix ga(an->data.rows(), an->data.cols());
      Matrix gb = ga;
      const double* x = an->data.data();
      const double* y = bn->data.data();
      const double* g = self->adj.data();
      for (std::size_t i = 0; i < ga.size(); ++i) {
        if (x[i] >= y[i])
          ga.data()[i] = g[i];
        else
          gb.data()[i] = g[i];
      }
      if (an->requires_grad) add_adj(an, ga);
      if (bn->requires_grad) add_adj(bn, gb);
    };
  });
}

Value relu(const Value& a) {
  Tape* t = tape_of(a, "relu");
  Node* an = a.node();
  Matrix out = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = std::max(out.data()[i], 0.0);
  return make_op(t, std::move(out), {an}, [an](Node* self) {
    return [an, self]() {
      Matrix g(an->data.rows(), an->data.cols());
      const double* x = an->data.data();
      const double* up = self->adj.data();
      for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = x[i] > 0.0 ? up[i] : 0.0;
      add_adj(an, g);
    };
  });
}

Value leaky_relu(const Value& a, double slope) {
  Tape* t = tape_of(a, "leaky_relu");
  Node* an = a.node();
  Matrix out = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double x = out.data()[i];
    out.data()[i] = x > 0.0 ? x : slope * x;
  }
  return make_op(t, std::move(out), {an}, [an, slope](Node* self) {
    return [an, slope, self]() {
      Matrix g(an->data.rows(), an->data.cols());
      const double* x = an->data.data();
      const double* up = self->adj.data();
      for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = x[i] > 0.0 ? up[i] : slope * up[i];
      add_adj(an, g);
    };
  });
}

Value exp(const Value& a) {
  Tape* t = tape_of(a, "exp");
  Node* an = a.node();
  Matrix out = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = std::exp(out.data()[i]);
  return make_op(t, std::move(out), {an}, [an](Node* self) {
    return [an, self]() { add_adj(an, hadamard(self->adj, self->data)); };
  });
}

Value log(const Value& a) {
  Tape* t = tape_of(a, "log");
  Node* an = a.node();
  Matrix out = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.data()[i] <= 0.0) {
      throw DomainError("log: non-positive entry " + std::to_string(out.data()[i]));
    }
    out.data()[i] = std::log(out.data()[i]);
  }
  return make_op(t, std::move(out), {an}, [an](Node* self) {
    return [an, self]() {
      Matrix g(an->data.rows(), an->data.cols());
      const double* x = an->data.data();
      const double* up = self->adj.data();
      for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = up[i] / x[i];
      add_adj(an, g);
    };
  });
}

Value softmax_rows(const Value& a) {
  Tape* t = tape_of(a, "softmax_rows");
  Node* an = a.node();
  Matrix out = a.data();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < out.cols(); ++j) mx = std::max(mx, out(i, j));
    double denom = 0.0;
    for (std::size_t j = 0; j < out.cols(); ++j) {
      out(i, j) = std::exp(out(i, j) - mx);
      denom += out(i, j);
    }
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) /= denom;
  }
  return make_op(t, std::move(out), {an}, [an](Node* self) {
    return [an, self]() {
      const Matrix& s = self->data;
      const Matrix& g = self->adj;
      Matrix dx(s.rows(), s.cols());
      for (std::size_t i = 0; i < s.rows(); ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < s.cols(); ++j) dot += g(i, j) * s(i, j);
        for (std::size_t j = 0; j < s.cols(); ++j) dx(i, j) = s(i, j) * (g(i, j) - dot);
      }
      add_adj(an, dx);
    };
  });
}

Value concat_cols(const Value& a, const Value& b) {
  Tape* t = tape_of(a, b, "concat_cols");
  if (a.rows() != b.rows()) {
    throw ShapeError("concat_cols: row counts differ: " + a.data().shape_str() + " vs " +
                     b.data().shape_str());
  }
  Node* an = a.node();
  Node* bn = b.node();
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a.data()(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b.data()(i, j);
  }
  return make_op(t, std::move(out), {an, bn}, [an, bn](Node* self) {
    return [an, bn, self]() {
      const std::size_t ca = an->data.cols();
      const std::size_t cb = bn->data.cols();
      if (an->requires_grad) {
        Matrix ga(an->data.rows(), ca);
        for (std::size_t i = 0; i < ga.rows(); ++i)
          for (std::size_t j = 0; j < ca; ++j) ga(i, j) = self->adj(i, j);
        add_adj(an, ga);
      }
      if (bn->requires_grad) {
        Matrix gb(bn->data.rows(), cb);
        for (std::size_t i = 0; i < gb.rows(); ++i)
          for (std::size_t j = 0; j < cb; ++j) gb(i, j) = self->adj(i, ca + j);
        add_adj(bn, gb);
      }
    };
  });
}

Value concat_rows(std::span<const Value> parts) {
  if (parts.empty()) throw ContractError("concat_rows: no operands");
  Tape* t = tape_of(parts.front(), "concat_rows");
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  std::vector<Node*> inputs;
  inputs.reserve(parts.size());
  for (const Value& v : parts) {
    if (tape_of(v, "concat_rows") != t) {
      throw ContractError("concat_rows: operands belong to different tapes");
    }
    if (v.cols() != cols) {
      throw ShapeError("concat_rows: column counts differ: " +
                       parts.front().data().shape_str() + " vs " + v.data().shape_str());
    }
    rows += v.rows();
    inputs.push_back(v.node());
  }
  Matrix out(rows, cols);
  std::size_t r = 0;
  for (const Value& v : parts) {
    for (std::size_t i = 0; i < v.rows(); ++i, ++r)
      for (std::size_t j = 0; j < cols; ++j) out(r, j) = v.data()(i, j);
  }
  std::vector<Node*> captured = inputs;
  return make_op(t, std::move(out), inputs, [captured](Node* self) {
    return [captured, self]() {
      std::size_t r = 0;
      for (Node* in : captured) {
        const std::size_t nr = in->data.rows();
        if (in->requires_grad) {
          Matrix g(nr, in->data.cols());
          for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) = self->adj(r + i, j);
          add_adj(in, g);
        }
        r += nr;
      }
    };
  });
}

Value transpose(const Value& a) {
  Tape* t = tape_of(a, "transpose");
  Node* an = a.node();
  return make_op(t, gpnet::transpose(a.data()), {an}, [an](Node* self) {
    return [an, self]() { add_adj(an, gpnet::transpose(self->adj)); };
  });
}

Value mean_over_rows(const Value& a) {
  Tape* t = tape_of(a, "mean_over_rows");
  Node* an = a.node();
  const std::size_t r = a.rows();
  Matrix out(1, a.cols());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(0, j) += a.data()(i, j);
  out *= 1.0 / static_cast<double>(r);
  return make_op(t, std::move(out), {an}, [an, r](Node* self) {
    return [an, r, self]() {
      Matrix g(an->data.rows(), an->data.cols());
      const double inv = 1.0 / static_cast<double>(r);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) = self->adj(0, j) * inv;
      add_adj(an, g);
    };
  });
}

Value max_over_rows(const Value& a) {
  Tape* t = tape_of(a, "max_over_rows");
  Node* an = a.node();
  Matrix out(1, a.cols());
  std::vector<std::size_t> argmax(a.cols(), 0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double best = a.data()(0, j);
    for (std::size_t i = 1; i < a.rows(); ++i) {
      if (a.data()(i, j) > best) {
        best = a.data()(i, j);
        argmax[j] = i;
      }
    }
    out(0, j) = best;
  }
  return make_op(t, std::move(out), {an}, [an, argmax](Node* self) {
    return [an, argmax, self]() {
      Matrix g(an->data.rows(), an->data.cols());
      for (std::size_t j = 0; j < g.cols(); ++j) g(argmax[j], j) = self->adj(0, j);
      add_adj(an, g);
    };
  });
}

Value mean_over_cols(const Value& a) {
  Tape* t = tape_of(a, "mean_over_cols");
  Node* an = a.node();
  const std::size_t c = a.cols();
  Matrix out(a.rows(), 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < c; ++j) acc += a.data()(i, j);
    out(i, 0) = acc / static_cast<double>(c);
  }
  return make_op(t, std::move(out), {an}, [an, c](Node* self) {
    return [an, c, self]() {
      Matrix g(an->data.rows(), an->data.cols());
      const double inv = 1.0 / static_cast<double>(c);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) = self->adj(i, 0) * inv;
      add_adj(an, g);
    };
  });
}

Value max_over_cols(const Value& a) {
  Tape* t = tape_of(a, "max_over_cols");
  Node* an = a.node();
  Matrix out(a.rows(), 1);
  std::vector<std::size_t> argmax(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double best = a.data()(i, 0);
    for (std::size_t j = 1; j < a.cols(); ++j) {
      if (a.data()(i, j) > best) {
        best = a.data()(i, j);
        argmax[i] = j;
      }
    }
    out(i, 0) = best;
  }
  return make_op(t, std::move(out), {an}, [an, argmax](Node* self) {
    return [an, argmax, self]() {
      Matrix g(an->data.rows(), an->data.cols());
      for (std::size_t i = 0; i < g.rows(); ++i) g(i, argmax[i]) = self->adj(i, 0);
      add_adj(an, g);
    };
  });
}

Value sum_all(const Value& a) {
  Tape* t = tape_of(a, "sum_all");
  Node* an = a.node();
  return make_op(t, Matrix(1, 1, gpnet::sum(a.data())), {an}, [an](Node* self) {
    return [an, self]() {
      add_adj(an, Matrix(an->data.rows(), an->data.cols(), self->adj(0, 0)));
    };
  });
}

Value l2_norm(const Value& a) {
  Tape* t = tape_of(a, "l2_norm");
  Node* an = a.node();
  const double n = frobenius_norm(a.data());
  return make_op(t, Matrix(1, 1, n), {an}, [an, n](Node* self) {
    return [an, n, self]() {
      if (n == 0.0) return;  // subgradient 0 at the origin
      add_adj(an, an->data * (self->adj(0, 0) / n));
    };
  });
}

Value scale(const Value& a, double c) {
  Tape* t = tape_of(a, "scale");
  Node* an = a.node();
  return make_op(t, a.data() * c, {an}, [an, c](Node* self) {
    return [an, c, self]() { add_adj(an, self->adj * c); };
  });
}

Value div_by_scalar(const Value& a, const Value& s) {
  Tape* t = tape_of(a, s, "div_by_scalar");
  if (s.rows() != 1 || s.cols() != 1) {
    throw ShapeError("div_by_scalar: divisor must be 1x1, got " + s.data().shape_str());
  }
  Node* an = a.node();
  Node* sn = s.node();
  const double sv = s.data()(0, 0);
  return make_op(t, a.data() * (1.0 / sv), {an, sn}, [an, sn, sv](Node* self) {
    return [an, sn, sv, self]() {
      if (an->requires_grad) add_adj(an, self->adj * (1.0 / sv));
      if (sn->requires_grad) {
        double acc = 0.0;
        const double* g = self->adj.data();
        const double* y = self->data.data();
        for (std::size_t i = 0; i < self->data.size(); ++i) acc += g[i] * y[i];
        add_adj(sn, Matrix(1, 1, -acc / sv));
      }
    };
  });
}

Value scale_rows(const Value& a, const Value& s) {
  Tape* t = tape_of(a, s, "scale_rows");
  if (s.cols() != 1 || s.rows() != a.rows()) {
    throw ShapeError("scale_rows: scaler must be " + std::to_string(a.rows()) +
                     "x1, got " + s.data().shape_str());
  }
  Node* an = a.node();
  Node* sn = s.node();
  Matrix out = a.data();
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= s.data()(i, 0);
  return make_op(t, std::move(out), {an, sn}, [an, sn](Node* self) {
    return [an, sn, self]() {
      if (an->requires_grad) {
        Matrix g(an->data.rows(), an->data.cols());
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) = self->adj(i, j) * sn->data(i, 0);
        add_adj(an, g);
      }
      if (sn->requires_grad) {
        Matrix g(sn->data.rows(), 1);
        for (std::size_t i = 0; i < g.rows(); ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < an->data.cols(); ++j)
            acc += self->adj(i, j) * an->data(i, j);
          g(i, 0) = acc;
        }
        add_adj(sn, g);
      }
    };
  });
}

Value select_rows(const Value& a, const std::vector<int>& indices) {
  Tape* t = tape_of(a, "select_rows");
  Node* an = a.node();
  Matrix out(indices.size(), a.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const int i = indices[r];
    if (i < 0 || static_cast<std::size_t>(i) >= a.rows()) {
      throw ContractError("select_rows: index " + std::to_string(i) + " out of range for " +
                          a.data().shape_str());
    }
    for (std::size_t j = 0; j < a.cols(); ++j) out(r, j) = a.data()(i, j);
  }
  return make_op(t, std::move(out), {an}, [an, indices](Node* self) {
    return [an, indices, self]() {
      Matrix g(an->data.rows(), an->data.cols());
      for (std::size_t r = 0; r < indices.size(); ++r)
        for (std::size_t j = 0; j < g.cols(); ++j) g(indices[r], j) += self->adj(r, j);
      add_adj(an, g);
    };
  });
}

Value cross_entropy_mean(const Value& logits, const std::vector<int>& labels) {
  Tape* t = tape_of(logits, "cross_entropy_mean");
  Node* zn = logits.node();
  const std::size_t n = logits.rows();
  const std::size_t c = logits.cols();
  if (labels.size() != n) {
    throw ContractError("cross_entropy_mean: " + std::to_string(labels.size()) +
                        " labels for " + std::to_string(n) + " rows");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      throw ContractError("cross_entropy_mean: label " + std::to_string(y) +
                          " out of range for " + std::to_string(c) + " classes");
    }
  }
  // softmax probabilities are reused by the backward rule
  Matrix probs = logits.data();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j) mx = std::max(mx, probs(i, j));
    double denom = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      probs(i, j) = std::exp(probs(i, j) - mx);
      denom += probs(i, j);
    }
    for (std::size_t j = 0; j < c; ++j) probs(i, j) /= denom;
    loss -= std::log(probs(i, static_cast<std::size_t>(labels[i])));
  }
  loss /= static_cast<double>(n);
  auto probs_ptr = std::make_shared<Matrix>(std::move(probs));
  return make_op(t, Matrix(1, 1, loss), {zn}, [zn, probs_ptr, labels, n](Node* self) {
    return [zn, probs_ptr, labels, n, self]() {
      Matrix g = *probs_ptr;
      for (std::size_t i = 0; i < n; ++i) g(i, static_cast<std::size_t>(labels[i])) -= 1.0;
      g *= self->adj(0, 0) / static_cast<double>(n);
      add_adj(zn, g);
    };
  });
}

}  // namespace gpnet::ad
