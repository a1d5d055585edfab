#include "gpnet/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gpnet/error.hpp"

namespace gpnet {

namespace {

Matrix xavier(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  return random_uniform(rows, cols, -bound, bound, rng);
}

}  // namespace

int pooled_node_count(const PoolConfig& config, std::size_t n) {
  if (config.method == PoolMethod::kMean || config.method == PoolMethod::kMax) return 1;
  if (config.keep_ratio <= 0.0 || config.keep_ratio > 1.0) {
    throw ConfigError("keep_ratio must lie in (0, 1], got " + std::to_string(config.keep_ratio));
  }
  const int m = static_cast<int>(std::llround(config.keep_ratio * static_cast<double>(n)));
  return std::max(1, std::min(m, static_cast<int>(n)));
}

std::vector<double> PooledGraph::node_scores() const {
  if (scores.rows() > 0) {  // SAGPool
    std::vector<double> out(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) out[i] = scores(i, 0);
    return out;
  }
  if (attention.rows() > 0) {  // MHFAPool: head-averaged attention weight
    std::vector<double> out(attention.cols(), 0.0);
    for (std::size_t k = 0; k < attention.rows(); ++k)
      for (std::size_t i = 0; i < attention.cols(); ++i) out[i] += attention(k, i);
    for (double& v : out) v /= static_cast<double>(attention.rows());
    return out;
  }
  if (assignment.rows() > 0) {  // DiffPool: strongest cluster affinity
    std::vector<double> out(assignment.rows(), 0.0);
    for (std::size_t i = 0; i < assignment.rows(); ++i)
      for (std::size_t k = 0; k < assignment.cols(); ++k)
        out[i] = std::max(out[i], assignment(i, k));
    return out;
  }
  return {};
}

PoolParams make_pool_params(ParameterSet& params, const PoolConfig& config, int feature_dim,
                            std::size_t n, const std::string& prefix, std::mt19937_64& rng) {
  PoolParams out;
  const std::size_t d = static_cast<std::size_t>(feature_dim);
  const int m = pooled_node_count(config, n);
  switch (config.method) {
    case PoolMethod::kDiffPool:
      out.assign_w = &params.create(prefix + ".assign.w", xavier(d, static_cast<std::size_t>(m), rng));
      break;
    case PoolMethod::kSagPool:
      out.score_w = &params.create(prefix + ".score.w", xavier(d, 1, rng));
      break;
    case PoolMethod::kMhfaPool:
      for (int k = 0; k < m; ++k) {
        out.head_w.push_back(
            &params.create(prefix + ".head" + std::to_string(k + 1) + ".w", xavier(2 * d, 1, rng)));
      }
      break;
    case PoolMethod::kMean:
    case PoolMethod::kMax:
      break;
  }
  return out;
}

PooledGraph diffpool(Forward& fwd, const ad::Value& h_gc, const Propagation& prop,
                     Parameter& assign_w) {
  const std::size_t n = h_gc.rows();
  if (assign_w.value.cols() > n) {
    throw ConfigError("diffpool: m = " + std::to_string(assign_w.value.cols()) +
                      " exceeds node count " + std::to_string(n));
  }
  PooledGraph out;
  ad::Value s = ad::softmax_rows(spectral_layer(fwd, h_gc, prop.normalized_adj, assign_w));
  out.h_pooled = ad::matmul(ad::transpose(s), h_gc);
  out.assignment = s.data();
  return out;
}

PooledGraph sagpool(Forward& fwd, const ad::Value& h_gc, const Propagation& prop,
                    Parameter& score_w, int m) {
  const std::size_t n = h_gc.rows();
  if (static_cast<std::size_t>(m) > n) {
    throw ConfigError("sagpool: m = " + std::to_string(m) + " exceeds node count " +
                      std::to_string(n));
  }
  // scores normalised over nodes, not within the single column
  ad::Value raw = spectral_layer(fwd, h_gc, prop.normalized_adj, score_w);
  ad::Value z = ad::transpose(ad::softmax_rows(ad::transpose(raw)));

  PooledGraph out;
  out.scores = z.data();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return out.scores(static_cast<std::size_t>(a), 0) > out.scores(static_cast<std::size_t>(b), 0);
  });
  out.retained.assign(order.begin(), order.begin() + m);

  // pooled rows keep the original node order; gating routes gradient to the
  // score parameters
  std::vector<int> keep = out.retained;
  std::sort(keep.begin(), keep.end());
  ad::Value h_kept = ad::select_rows(h_gc, keep);
  ad::Value z_kept = ad::select_rows(z, keep);
  out.h_pooled = ad::scale_rows(h_kept, z_kept);
  return out;
}

namespace {

double iterate_change(const Matrix& a, const Matrix& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

Matrix power_iteration_start(const Matrix& c) {
  const std::size_t n = c.rows();
  Matrix start(n, 1);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += c(i, j);
    start(i, 0) = row;
    total += row;
  }
  // keep every entry strictly positive so the iterate cannot be orthogonal
  // to the dominant (non-negative) eigenvector
  const double shift = total > 0.0 ? 0.01 * total / static_cast<double>(n) : 1.0;
  for (std::size_t i = 0; i < n; ++i) start(i, 0) += shift;
  const double norm = frobenius_norm(start);
  start *= 1.0 / norm;
  return start;
}

PowerIterationResult power_iteration(const Matrix& c, int max_iters, double tol) {
  if (c.rows() != c.cols()) {
    throw ShapeError("power_iteration: matrix must be square, got " + c.shape_str());
  }
  PowerIterationResult res;
  Matrix xi = power_iteration_start(c);
  for (int it = 0; it < max_iters; ++it) {
    Matrix next = matmul(c, xi);
    const double norm = frobenius_norm(next);
    if (norm == 0.0) break;  // xi lies in the null space; keep the last iterate
    next *= 1.0 / norm;
    const double change = iterate_change(next, xi);
    xi = std::move(next);
    res.iterations = it + 1;
    if (change < tol) {
      res.converged = true;
      break;
    }
  }
  Matrix cxi = matmul(c, xi);
  double rayleigh = 0.0;
  for (std::size_t i = 0; i < xi.rows(); ++i) rayleigh += xi(i, 0) * cxi(i, 0);
  res.eigenvalue = rayleigh;
  res.eigenvector = std::move(xi);
  return res;
}

namespace {

// One attention head: full coefficient matrix, dominant eigenvector by
// unrolled power iteration, softmax aggregation of node features.
ad::Value mhfa_head(Forward& fwd, const ad::Value& h_gc, Parameter& head_w, int power_iter_max,
                    double power_iter_tol, Matrix* attention_row, Matrix* eigenvector_row,
                    int* iterations) {
  const std::size_t n = h_gc.rows();
  const std::size_t d = h_gc.cols();
  if (head_w.value.rows() != 2 * d || head_w.value.cols() != 1) {
    throw ShapeError("mhfapool: head vector must be " + std::to_string(2 * d) + "x1, got " +
                     head_w.value.shape_str());
  }
  ad::Value w = fwd.use(head_w);
  std::vector<int> top(d), bot(d);
  for (std::size_t i = 0; i < d; ++i) {
    top[i] = static_cast<int>(i);
    bot[i] = static_cast<int>(d + i);
  }
  ad::Value u = ad::matmul(h_gc, ad::select_rows(w, top));  // n x 1
  ad::Value v = ad::matmul(h_gc, ad::select_rows(w, bot));  // n x 1
  ad::Value ones_row = fwd.constant(Matrix::ones(1, n));
  ad::Value ones_col = fwd.constant(Matrix::ones(n, 1));
  ad::Value c = ad::relu(
      ad::add(ad::matmul(u, ones_row), ad::matmul(ones_col, ad::transpose(v))));

  ad::Value weights;
  if (max_abs(c.data()) == 0.0) {
    // dead head: softmax of an all-zero score vector is uniform, and no
    // gradient can flow through the ReLU anyway
    *attention_row = Matrix(1, n, 1.0 / static_cast<double>(n));
    *eigenvector_row = Matrix(1, n, 1.0 / std::sqrt(static_cast<double>(n)));
    *iterations = 0;
    weights = fwd.constant(*attention_row);
  } else {
    // same start as power_iteration_start, but recorded on the tape so the
    // head gradient sees the dependence of the start on C
    ad::Value rowsums = ad::matmul(c, ones_col);
    ad::Value shift = ad::scale(ad::sum_all(c), 0.01 / static_cast<double>(n));
    ad::Value start = ad::add(rowsums, ad::matmul(ones_col, shift));
    ad::Value xi = ad::div_by_scalar(start, ad::l2_norm(start));
    int executed = 0;
    for (int it = 0; it < power_iter_max; ++it) {
      ad::Value next = ad::matmul(c, xi);
      ad::Value norm = ad::l2_norm(next);
      ad::Value normalized = ad::div_by_scalar(next, norm);
      const double change = iterate_change(normalized.data(), xi.data());
      xi = normalized;
      executed = it + 1;
      if (change < power_iter_tol) break;
    }
    *iterations = executed;
    *eigenvector_row = transpose(xi.data());
    weights = ad::softmax_rows(ad::transpose(xi));
    *attention_row = weights.data();
  }
  return ad::matmul(weights, h_gc);  // 1 x d
}

}  // namespace

PooledGraph mhfapool(Forward& fwd, const ad::Value& h_gc,
                     const std::vector<Parameter*>& head_w, int power_iter_max,
                     double power_iter_tol) {
  if (head_w.empty()) throw ConfigError("mhfapool: needs at least one head");
  const std::size_t n = h_gc.rows();
  const std::size_t m = head_w.size();
  PooledGraph out;
  out.attention = Matrix(m, n);
  out.eigenvectors = Matrix(m, n);
  out.power_iterations.resize(m);
  std::vector<ad::Value> heads;
  heads.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    Matrix att, eig;
    int iters = 0;
    heads.push_back(mhfa_head(fwd, h_gc, *head_w[k], power_iter_max, power_iter_tol, &att, &eig,
                              &iters));
    for (std::size_t i = 0; i < n; ++i) {
      out.attention(k, i) = att(0, i);
      out.eigenvectors(k, i) = eig(0, i);
    }
    out.power_iterations[static_cast<std::size_t>(k)] = iters;
  }
  out.h_pooled = m == 1 ? heads.front() : ad::concat_rows(heads);
  return out;
}

PooledGraph mean_pool(const ad::Value& h_gc) {
  PooledGraph out;
  out.h_pooled = ad::mean_over_rows(h_gc);
  return out;
}

PooledGraph max_pool(const ad::Value& h_gc) {
  PooledGraph out;
  out.h_pooled = ad::max_over_rows(h_gc);
  return out;
}

PooledGraph pool_graph(Forward& fwd, const ad::Value& h_gc, const Propagation& prop,
                       const PoolConfig& config, const PoolParams& params) {
  const int m = pooled_node_count(config, h_gc.rows());
  switch (config.method) {
    case PoolMethod::kMean:
      return mean_pool(h_gc);
    case PoolMethod::kMax:
      return max_pool(h_gc);
    case PoolMethod::kDiffPool:
      return diffpool(fwd, h_gc, prop, *params.assign_w);
    case PoolMethod::kSagPool:
      return sagpool(fwd, h_gc, prop, *params.score_w, m);
    case PoolMethod::kMhfaPool:
      return mhfapool(fwd, h_gc, params.head_w, config.power_iter_max, config.power_iter_tol);
  }
  throw ConfigError("unknown pooling method");
}

ReadoutParams make_readout_params(ParameterSet& params, int feature_dim, int out_dim,
                                  const std::string& prefix, std::mt19937_64& rng) {
  ReadoutParams out;
  const std::size_t d = static_cast<std::size_t>(feature_dim);
  const std::size_t o = static_cast<std::size_t>(out_dim);
  out.w = &params.create(prefix + ".readout.w", xavier(2 * d, o, rng));
  out.b = &params.create(prefix + ".readout.b", Matrix(1, o));
  return out;
}

ad::Value readout(Forward& fwd, const ad::Value& h_pooled, const ReadoutParams& params) {
  ad::Value cat = ad::concat_cols(ad::mean_over_rows(h_pooled), ad::max_over_rows(h_pooled));
  return ad::add(ad::matmul(cat, fwd.use(*params.w)), fwd.use(*params.b));
}

}  // namespace gpnet
