#pragma once

#include <string>
#include <vector>

#include "gpnet/autodiff.hpp"
#include "gpnet/gc_layers.hpp"
#include "gpnet/params.hpp"

namespace gpnet {

enum class PoolMethod { kMean, kMax, kDiffPool, kSagPool, kMhfaPool };

struct PoolConfig {
  PoolMethod method = PoolMethod::kMhfaPool;
  double keep_ratio = 0.25;
  int power_iter_max = 5;
  double power_iter_tol = 1e-6;
};

// Pooled node count: mean/max always collapse to one node.
int pooled_node_count(const PoolConfig& config, std::size_t n);

// Pooled features plus the per-method record of how nodes were weighted,
// kept as plain data for inspection and the pool-demo CSV.
struct PooledGraph {
  ad::Value h_pooled;  // m x d

  Matrix assignment;           // DiffPool S, n x m
  Matrix scores;               // SAGPool Z, n x 1
  std::vector<int> retained;   // SAGPool, sorted by (score desc, index asc)
  Matrix attention;            // MHFAPool, m x n softmax(xi^T) rows
  Matrix eigenvectors;         // MHFAPool, m x n unit xi^T rows
  std::vector<int> power_iterations;  // per head

  // Scalar per-node weight for reporting: method-specific, see node_scores().
  std::vector<double> node_scores() const;
};

struct PoolParams {
  Parameter* assign_w = nullptr;       // DiffPool, d x m
  Parameter* score_w = nullptr;        // SAGPool, d x 1
  std::vector<Parameter*> head_w;      // MHFAPool, m of 2d x 1
};

PoolParams make_pool_params(ParameterSet& params, const PoolConfig& config, int feature_dim,
                            std::size_t n, const std::string& prefix, std::mt19937_64& rng);

PooledGraph pool_graph(Forward& fwd, const ad::Value& h_gc, const Propagation& prop,
                       const PoolConfig& config, const PoolParams& params);

PooledGraph diffpool(Forward& fwd, const ad::Value& h_gc, const Propagation& prop,
                     Parameter& assign_w);
PooledGraph sagpool(Forward& fwd, const ad::Value& h_gc, const Propagation& prop,
                    Parameter& score_w, int m);
PooledGraph mhfapool(Forward& fwd, const ad::Value& h_gc,
                     const std::vector<Parameter*>& head_w, int power_iter_max,
                     double power_iter_tol);
PooledGraph mean_pool(const ad::Value& h_gc);
PooledGraph max_pool(const ad::Value& h_gc);

// Plain-matrix power iteration toward the dominant eigenvector of a square
// non-negative matrix. The start vector is derived from the row sums, which
// makes the whole routine equivariant under symmetric permutation.
struct PowerIterationResult {
  Matrix eigenvector;  // n x 1, unit norm
  double eigenvalue = 0.0;  // Rayleigh quotient at the final iterate
  int iterations = 0;
  bool converged = false;
};
PowerIterationResult power_iteration(const Matrix& c, int max_iters, double tol);
Matrix power_iteration_start(const Matrix& c);

struct ReadoutParams {
  Parameter* w = nullptr;  // 2d x out
  Parameter* b = nullptr;  // 1 x out
};
ReadoutParams make_readout_params(ParameterSet& params, int feature_dim, int out_dim,
                                  const std::string& prefix, std::mt19937_64& rng);

// f = FC(mean over pooled nodes || max over pooled nodes)
ad::Value readout(Forward& fwd, const ad::Value& h_pooled, const ReadoutParams& params);

}  // namespace gpnet
