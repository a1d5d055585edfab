#pragma once

#include <set>
#include <utility>
#include <vector>

#include "gpnet/autodiff.hpp"
#include "gpnet/feature_maps.hpp"
#include "gpnet/matrix.hpp"
#include "gpnet/params.hpp"

namespace gpnet {

// Directed edge (source -> target): the source's feature is aggregated into
// the target.
using Edge = std::pair<int, int>;
using EdgeSet = std::set<Edge>;

enum class EdgeRule {
  kDual,       // temporal + Euclidean neighbourhoods
  kTemporal,   // same part, frame distance in (0, delta_t]
  kEuclidean,  // k nearest feature neighbours, self excluded
};

// One granularity branch's graph: n = T*p nodes in frame-major, part-minor
// order (node for frame t, part q sits at index t*p + q).
struct GranularGraph {
  int p = 1;
  Matrix node_features;          // n x c
  std::vector<int> part_index;   // in [0, p)
  std::vector<int> frame_index;  // in [0, T)
  EdgeSet edges;

  std::size_t node_count() const { return node_features.rows(); }
  // in-neighbours of each node, ascending, self excluded
  std::vector<std::vector<int>> in_neighbors() const;
};

// Average-pools p horizontal bands per frame into one feature vector each.
// Output is (T*p) x c in frame-major order; p=1 pools the whole map.
Matrix extract_granular_features(const FeatureMapSequence& seq, int p);

GranularGraph build_granular_graph(const FeatureMapSequence& seq, int p, EdgeRule rule,
                                   int delta_t, int k);

EdgeSet build_dna_edges(const Matrix& features, const std::vector<int>& frame_index,
                        const std::vector<int>& part_index, int delta_t, int k);
EdgeSet build_tna_edges(const std::vector<int>& frame_index, const std::vector<int>& part_index,
                        int delta_t);
EdgeSet build_ena_edges(const Matrix& features, int k);

// Binary adjacency: A[i][j] = 1 iff (j -> i) is an edge.
Matrix adjacency_from_edges(const EdgeSet& edges, std::size_t n);
// D^{-1/2} (A + I) D^{-1/2} with D the row-degree of the self-looped matrix.
Matrix normalized_adjacency(const Matrix& adjacency);
// Row i is 1/|N(i)| over in-neighbours (no self loop); all-zero when empty.
Matrix neighbor_mean_matrix(const EdgeSet& edges, std::size_t n);

// Dense row-stochastic adjacency A_ij = softmax_j(leaky_relu(a^T [f_i||f_j])),
// differentiable in the attention vector. `attention` has shape 2c x 1.
ad::Value self_attention_adjacency(Forward& fwd, const Matrix& features, Parameter& attention,
                                   double leaky_slope = 0.2);

}  // namespace gpnet
