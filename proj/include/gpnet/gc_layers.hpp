#pragma once

#include <string>
#include <vector>

#include "gpnet/autodiff.hpp"
#include "gpnet/graph.hpp"
#include "gpnet/params.hpp"

namespace gpnet {

enum class GcKind { kSpatial, kSpectral };

struct GcStackConfig {
  GcKind kind = GcKind::kSpatial;
  int num_layers = 2;
  int hidden_dim = 256;
  int spectral_shortcut_out_dim = 256;
};

// The aggregation operators a graph exposes to convolution layers. For edge
// graphs both are constants; for the self-attention variant one dense
// differentiable row-stochastic matrix plays both roles.
struct Propagation {
  ad::Value neighbor_mean;   // n x n, used by the spatial layer
  ad::Value normalized_adj;  // n x n, used by spectral layers and pool GNNs
};

Propagation propagation_from_edges(Forward& fwd, const EdgeSet& edges, std::size_t n);
Propagation propagation_from_attention(const ad::Value& attention_adjacency);

struct SpatialLayerParams {
  Parameter* w_self = nullptr;   // d_in x hidden/2
  Parameter* w_neigh = nullptr;  // d_in x hidden/2
};

struct GcStackParams {
  std::vector<SpatialLayerParams> spatial;  // one per layer
  std::vector<Parameter*> spectral;         // W per layer, d_in x hidden
  Parameter* shortcut_w = nullptr;          // (L*hidden) x out
  Parameter* shortcut_b = nullptr;          // 1 x out
};

// Registers all stack parameters under `prefix`, seeded uniform Xavier.
GcStackParams make_gc_stack_params(ParameterSet& params, const GcStackConfig& config,
                                   int input_dim, const std::string& prefix,
                                   std::mt19937_64& rng);

// h_i = relu(w1 h_i || w2 mean_{j in N(i)} h_j); an empty neighbourhood
// contributes a zero vector.
ad::Value spatial_layer(Forward& fwd, const ad::Value& h_prev, const ad::Value& neighbor_mean,
                        const SpatialLayerParams& params);

// H = relu(normalized_adjacency * H_prev * W)
ad::Value spectral_layer(Forward& fwd, const ad::Value& h_prev, const ad::Value& normalized_adj,
                         Parameter& weight);

// Spatial: features of the last layer. Spectral: learnable projection of the
// concatenated per-layer features.
ad::Value run_gc_stack(Forward& fwd, const ad::Value& h0, const Propagation& prop,
                       const GcStackConfig& config, const GcStackParams& params);

int gc_output_dim(const GcStackConfig& config);

}  // namespace gpnet
