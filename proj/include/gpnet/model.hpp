#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpnet/feature_maps.hpp"
#include "gpnet/gc_layers.hpp"
#include "gpnet/params.hpp"
#include "gpnet/pooling.hpp"

namespace gpnet {

enum class AdjacencyVariant { kDna, kTna, kEna, kSelfAttention };

struct GpnetConfig {
  std::vector<int> granularities{1, 2, 4, 8};
  GcStackConfig gc;
  PoolConfig pool;
  AdjacencyVariant adjacency = AdjacencyVariant::kDna;
  int delta_t = 1;
  int knn = 2;
  int t_frames = 8;
  int readout_dim_global = 2048;  // branch output width for p = 1
  int readout_dim_part = 1024;    // branch output width for p > 1
};

struct BranchOutput {
  int p = 1;
  GranularGraph graph;
  PooledGraph pooled;
  ad::Value representation;  // 1 x branch width
};

struct ModelOutput {
  ad::Value representation;  // 1 x representation_dim
  std::vector<BranchOutput> branches;
};

// Multi-branch video-representation network: one graph per granularity,
// shared nothing between branches; branch outputs concatenated in ascending
// granularity order.
class GpnetModel {
 public:
  GpnetModel(const GpnetConfig& config, int channels, int num_identities, std::uint64_t seed);

  ModelOutput forward(Forward& fwd, const FeatureMapSequence& seq) const;
  // Classification logits for a batch of stacked representations (N x D).
  ad::Value classify(Forward& fwd, const ad::Value& representations) const;

  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  const GpnetConfig& config() const { return config_; }
  int representation_dim() const { return representation_dim_; }
  int channels() const { return channels_; }
  int num_identities() const { return num_identities_; }

 private:
  struct Branch {
    int p = 1;
    int nodes = 0;
    int readout_dim = 0;
    GcStackParams gc;
    PoolParams pool;
    ReadoutParams readout;
    Parameter* sa_attention = nullptr;
  };

  BranchOutput run_branch(Forward& fwd, const FeatureMapSequence& seq, const Branch& branch) const;

  GpnetConfig config_;
  int channels_ = 0;
  int num_identities_ = 0;
  int representation_dim_ = 0;
  ParameterSet params_;
  std::vector<Branch> branches_;
  Parameter* classifier_w_ = nullptr;
  Parameter* classifier_b_ = nullptr;
};

// Batch-hard triplet objective: per anchor, hinge on (hardest positive
// distance - hardest negative distance + margin), summed over anchors.
// Hardest pairs are selected on the forward values; gradient flows through
// the selected pairs.
ad::Value triplet_loss_batch_hard(const std::vector<ad::Value>& representations,
                                  const std::vector<int>& labels, double margin);

// Mean cross entropy between softmax(logits) and the identity labels.
ad::Value identity_loss(const ad::Value& logits, const std::vector<int>& labels);

}  // namespace gpnet
