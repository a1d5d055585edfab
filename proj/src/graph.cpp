#include "gpnet/graph.hpp"

#include <algorithm>
#include <cmath>

#include "gpnet/error.hpp"

namespace gpnet {

std::vector<std::vector<int>> GranularGraph::in_neighbors() const {
  std::vector<std::vector<int>> nbrs(node_count());
  for (const auto& [src, dst] : edges) nbrs[static_cast<std::size_t>(dst)].push_back(src);
  for (auto& v : nbrs) std::sort(v.begin(), v.end());
  return nbrs;
}

Matrix extract_granular_features(const FeatureMapSequence& seq, int p) {
  if (p < 1) throw ConfigError("granularity order must be >= 1, got " + std::to_string(p));
  if (seq.height % static_cast<std::size_t>(p) != 0) {
    throw ConfigError("granularity " + std::to_string(p) + " does not divide map height " +
                      std::to_string(seq.height));
  }
  const std::size_t band = seq.height / static_cast<std::size_t>(p);
  const std::size_t n = seq.t_frames * static_cast<std::size_t>(p);
  Matrix out(n, seq.channels);
  const double inv = 1.0 / static_cast<double>(band * seq.width);
  for (std::size_t t = 0; t < seq.t_frames; ++t) {
    for (int q = 0; q < p; ++q) {
      const std::size_t node = t * static_cast<std::size_t>(p) + static_cast<std::size_t>(q);
      const std::size_t y0 = static_cast<std::size_t>(q) * band;
      for (std::size_t y = y0; y < y0 + band; ++y) {
        for (std::size_t x = 0; x < seq.width; ++x) {
          for (std::size_t ch = 0; ch < seq.channels; ++ch) {
            out(node, ch) += seq.at(t, y, x, ch);
          }
        }
      }
      for (std::size_t ch = 0; ch < seq.channels; ++ch) out(node, ch) *= inv;
    }
  }
  return out;
}

EdgeSet build_tna_edges(const std::vector<int>& frame_index, const std::vector<int>& part_index,
                        int delta_t) {
  if (delta_t < 0) throw ConfigError("delta_t must be >= 0, got " + std::to_string(delta_t));
  if (frame_index.size() != part_index.size()) {
    throw ContractError("frame/part label counts differ");
  }
  const int n = static_cast<int>(frame_index.size());
  EdgeSet edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i || part_index[j] != part_index[i]) continue;
      const int df = std::abs(frame_index[i] - frame_index[j]);
      if (df > 0 && df <= delta_t) edges.insert({j, i});
    }
  }
  return edges;
}

EdgeSet build_ena_edges(const Matrix& features, int k) {
  const int n = static_cast<int>(features.rows());
  if (k < 0) throw ConfigError("k must be >= 0, got " + std::to_string(k));
  if (k >= n) {
    throw ConfigError("k = " + std::to_string(k) + " must be smaller than node count " +
                      std::to_string(n));
  }
  EdgeSet edges;
  if (k == 0) return edges;
  std::vector<std::pair<double, int>> dist;
  dist.reserve(static_cast<std::size_t>(n) - 1);
  for (int i = 0; i < n; ++i) {
    dist.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double d2 = 0.0;
      for (std::size_t ch = 0; ch < features.cols(); ++ch) {
        const double diff = features(static_cast<std::size_t>(i), ch) -
                            features(static_cast<std::size_t>(j), ch);
        d2 += diff * diff;
      }
      dist.emplace_back(d2, j);
    }
    // ties broken toward the lower node index
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    for (int r = 0; r < k; ++r) edges.insert({dist[static_cast<std::size_t>(r)].second, i});
  }
  return edges;
}

EdgeSet build_dna_edges(const Matrix& features, const std::vector<int>& frame_index,
                        const std::vector<int>& part_index, int delta_t, int k) {
  EdgeSet edges = build_tna_edges(frame_index, part_index, delta_t);
  EdgeSet ena = build_ena_edges(features, k);
  edges.insert(ena.begin(), ena.end());
  return edges;
}

GranularGraph build_granular_graph(const FeatureMapSequence& seq, int p, EdgeRule rule,
                                   int delta_t, int k) {
  GranularGraph g;
  g.p = p;
  g.node_features = extract_granular_features(seq, p);
  const std::size_t n = g.node_features.rows();
  g.part_index.resize(n);
  g.frame_index.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.part_index[i] = static_cast<int>(i % static_cast<std::size_t>(p));
    g.frame_index[i] = static_cast<int>(i / static_cast<std::size_t>(p));
  }
  switch (rule) {
    case EdgeRule::kDual:
      g.edges = build_dna_edges(g.node_features, g.frame_index, g.part_index, delta_t, k);
      break;
    case EdgeRule::kTemporal:
      g.edges = build_tna_edges(g.frame_index, g.part_index, delta_t);
      break;
    case EdgeRule::kEuclidean:
      g.edges = build_ena_edges(g.node_features, k);
      break;
  }
  return g;
}

Matrix adjacency_from_edges(const EdgeSet& edges, std::size_t n) {
  Matrix a(n, n);
  for (const auto& [src, dst] : edges) {
    if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= n ||
        static_cast<std::size_t>(dst) >= n) {
      throw ContractError("edge (" + std::to_string(src) + " -> " + std::to_string(dst) +
                          ") out of range for " + std::to_string(n) + " nodes");
    }
    a(static_cast<std::size_t>(dst), static_cast<std::size_t>(src)) = 1.0;
  }
  return a;
}

Matrix normalized_adjacency(const Matrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw ShapeError("normalized_adjacency: matrix must be square, got " +
                     adjacency.shape_str());
  }
  const std::size_t n = adjacency.rows();
  Matrix tilde = adjacency;
  for (std::size_t i = 0; i < n; ++i) tilde(i, i) += 1.0;  // self loop keeps degrees positive
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += tilde(i, j);
    inv_sqrt[i] = 1.0 / std::sqrt(deg);
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = inv_sqrt[i] * tilde(i, j) * inv_sqrt[j];
  return out;
}

Matrix neighbor_mean_matrix(const EdgeSet& edges, std::size_t n) {
  Matrix m(n, n);
  std::vector<int> degree(n, 0);
  for (const auto& [src, dst] : edges) {
    m(static_cast<std::size_t>(dst), static_cast<std::size_t>(src)) = 1.0;
    ++degree[static_cast<std::size_t>(dst)];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (degree[i] == 0) continue;
    const double inv = 1.0 / static_cast<double>(degree[i]);
    for (std::size_t j = 0; j < n; ++j) m(i, j) *= inv;
  }
  return m;
}

ad::Value self_attention_adjacency(Forward& fwd, const Matrix& features, Parameter& attention,
                                   double leaky_slope) {
  const std::size_t n = features.rows();
  const std::size_t c = features.cols();
  if (attention.value.rows() != 2 * c || attention.value.cols() != 1) {
    throw ShapeError("self_attention_adjacency: attention vector must be " +
                     std::to_string(2 * c) + "x1, got " + attention.value.shape_str());
  }
  ad::Value a = fwd.use(attention);
  // split a into the halves applied to f_i and f_j; scores_ij = u_i + v_j
  ad::Value f = fwd.constant(features);
  ad::Value a_top = ad::select_rows(a, [&] {
    std::vector<int> idx(c);
    for (std::size_t i = 0; i < c; ++i) idx[i] = static_cast<int>(i);
    return idx;
  }());
  ad::Value a_bot = ad::select_rows(a, [&] {
    std::vector<int> idx(c);
    for (std::size_t i = 0; i < c; ++i) idx[i] = static_cast<int>(c + i);
    return idx;
  }());
  ad::Value u = ad::matmul(f, a_top);                        // n x 1
  ad::Value v = ad::matmul(f, a_bot);                        // n x 1
  ad::Value ones_row = fwd.constant(Matrix::ones(1, n));     // 1 x n
  ad::Value ones_col = fwd.constant(Matrix::ones(n, 1));     // n x 1
  ad::Value scores = ad::add(ad::matmul(u, ones_row), ad::matmul(ones_col, ad::transpose(v)));
  return ad::softmax_rows(ad::leaky_relu(scores, leaky_slope));
}

}  // namespace gpnet
