#include "gpnet/model.hpp"

#include <algorithm>
#include <cmath>

#include "gpnet/error.hpp"
#include "gpnet/graph.hpp"

namespace gpnet {

namespace {

Matrix xavier(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  return random_uniform(rows, cols, -bound, bound, rng);
}

EdgeRule edge_rule_for(AdjacencyVariant variant) {
  switch (variant) {
    case AdjacencyVariant::kDna:
      return EdgeRule::kDual;
    case AdjacencyVariant::kTna:
      return EdgeRule::kTemporal;
    case AdjacencyVariant::kEna:
      return EdgeRule::kEuclidean;
    case AdjacencyVariant::kSelfAttention:
      break;
  }
  throw ConfigError("adjacency variant has no edge rule");
}

}  // namespace

GpnetModel::GpnetModel(const GpnetConfig& config, int channels, int num_identities,
                       std::uint64_t seed)
    : config_(config), channels_(channels), num_identities_(num_identities) {
  if (config_.granularities.empty()) throw ConfigError("granularity set must not be empty");
  std::vector<int> ps = config_.granularities;
  std::sort(ps.begin(), ps.end());
  if (std::adjacent_find(ps.begin(), ps.end()) != ps.end()) {
    throw ConfigError("granularity set contains duplicates");
  }
  if (ps.front() < 1) throw ConfigError("granularity orders must be >= 1");
  config_.granularities = ps;
  if (config_.t_frames < 1) throw ConfigError("t_frames must be >= 1");
  if (channels_ < 1) throw ConfigError("channel count must be >= 1");
  if (num_identities_ < 1) throw ConfigError("num_identities must be >= 1");

  std::mt19937_64 rng(seed);
  for (int p : config_.granularities) {
    Branch b;
    b.p = p;
    b.nodes = config_.t_frames * p;
    b.readout_dim = p == 1 ? config_.readout_dim_global : config_.readout_dim_part;
    const std::string prefix = "p" + std::to_string(p);
    if (config_.adjacency == AdjacencyVariant::kSelfAttention) {
      b.sa_attention = &params_.create(prefix + ".sa.a",
                                       xavier(2 * static_cast<std::size_t>(channels_), 1, rng));
    }
    b.gc = make_gc_stack_params(params_, config_.gc, channels_, prefix, rng);
    const int d = gc_output_dim(config_.gc);
    b.pool = make_pool_params(params_, config_.pool, d, static_cast<std::size_t>(b.nodes),
                              prefix + ".pool", rng);
    b.readout = make_readout_params(params_, d, b.readout_dim, prefix, rng);
    representation_dim_ += b.readout_dim;
    branches_.push_back(std::move(b));
  }
  classifier_w_ = &params_.create(
      "classifier.w",
      xavier(static_cast<std::size_t>(representation_dim_),
             static_cast<std::size_t>(num_identities_), rng));
  classifier_b_ = &params_.create("classifier.b",
                                  Matrix(1, static_cast<std::size_t>(num_identities_)));
}

BranchOutput GpnetModel::run_branch(Forward& fwd, const FeatureMapSequence& seq,
                                    const Branch& branch) const {
  BranchOutput out;
  out.p = branch.p;

  Propagation prop;
  if (config_.adjacency == AdjacencyVariant::kSelfAttention) {
    out.graph.p = branch.p;
    out.graph.node_features = extract_granular_features(seq, branch.p);
    const std::size_t n = out.graph.node_features.rows();
    out.graph.part_index.resize(n);
    out.graph.frame_index.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.graph.part_index[i] = static_cast<int>(i % static_cast<std::size_t>(branch.p));
      out.graph.frame_index[i] = static_cast<int>(i / static_cast<std::size_t>(branch.p));
    }
    prop = propagation_from_attention(
        self_attention_adjacency(fwd, out.graph.node_features, *branch.sa_attention));
  } else {
    out.graph = build_granular_graph(seq, branch.p, edge_rule_for(config_.adjacency),
                                     config_.delta_t, config_.knn);
    prop = propagation_from_edges(fwd, out.graph.edges, out.graph.node_count());
  }

  ad::Value h0 = fwd.constant(out.graph.node_features);
  ad::Value h_gc = run_gc_stack(fwd, h0, prop, config_.gc, branch.gc);
  out.pooled = pool_graph(fwd, h_gc, prop, config_.pool, branch.pool);
  out.representation = readout(fwd, out.pooled.h_pooled, branch.readout);
  return out;
}

ModelOutput GpnetModel::forward(Forward& fwd, const FeatureMapSequence& seq) const {
  if (static_cast<int>(seq.t_frames) != config_.t_frames) {
    throw ContractError("sequence has " + std::to_string(seq.t_frames) + " frames, model expects " +
                        std::to_string(config_.t_frames));
  }
  if (static_cast<int>(seq.channels) != channels_) {
    throw ContractError("sequence has " + std::to_string(seq.channels) +
                        " channels, model expects " + std::to_string(channels_));
  }
  ModelOutput out;
  for (const Branch& b : branches_) {
    out.branches.push_back(run_branch(fwd, seq, b));
    const ad::Value& r = out.branches.back().representation;
    out.representation = out.representation.valid() ? ad::concat_cols(out.representation, r) : r;
  }
  return out;
}

ad::Value GpnetModel::classify(Forward& fwd, const ad::Value& representations) const {
  return ad::add(ad::matmul(representations, fwd.use(*classifier_w_)), fwd.use(*classifier_b_));
}

ad::Value triplet_loss_batch_hard(const std::vector<ad::Value>& representations,
                                  const std::vector<int>& labels, double margin) {
  const std::size_t n = representations.size();
  if (n == 0 || labels.size() != n) {
    throw ContractError("triplet loss: label count does not match batch size");
  }
  // pairwise distances on forward values, for hard mining only
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Matrix& a = representations[i].data();
      const Matrix& b = representations[j].data();
      double acc = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a.data()[k] - b.data()[k];
        acc += d * d;
      }
      dist[i][j] = dist[j][i] = std::sqrt(acc);
    }
  }

  ad::Tape* tape = representations.front().node()->tape;
  ad::Value margin_term;
  ad::Value total;
  for (std::size_t i = 0; i < n; ++i) {
    int hardest_pos = -1;
    int hardest_neg = -1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (labels[j] == labels[i]) {
        if (hardest_pos < 0 || dist[i][j] > dist[i][static_cast<std::size_t>(hardest_pos)]) {
          hardest_pos = static_cast<int>(j);
        }
      } else {
        if (hardest_neg < 0 || dist[i][j] < dist[i][static_cast<std::size_t>(hardest_neg)]) {
          hardest_neg = static_cast<int>(j);
        }
      }
    }
    if (hardest_pos < 0) {
      throw ContractError("triplet loss: anchor " + std::to_string(i) +
                          " has no positive in the batch");
    }
    if (hardest_neg < 0) {
      throw ContractError("triplet loss: anchor " + std::to_string(i) +
                          " has no negative in the batch");
    }
    ad::Value d_pos = ad::l2_norm(
        ad::sub(representations[i], representations[static_cast<std::size_t>(hardest_pos)]));
    ad::Value d_neg = ad::l2_norm(
        ad::sub(representations[i], representations[static_cast<std::size_t>(hardest_neg)]));
    if (!margin_term.valid()) margin_term = tape->constant(Matrix(1, 1, margin));
    ad::Value term = ad::relu(ad::add(margin_term, ad::sub(d_pos, d_neg)));
    total = total.valid() ? ad::add(total, term) : term;
  }
  return total;
}

ad::Value identity_loss(const ad::Value& logits, const std::vector<int>& labels) {
  return ad::cross_entropy_mean(logits, labels);
}

}  // namespace gpnet
