#include "gpnet/gc_layers.hpp"

#include <cmath>

#include "gpnet/error.hpp"

namespace gpnet {

namespace {

Matrix xavier(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  return random_uniform(rows, cols, -bound, bound, rng);
}

}  // namespace

Propagation propagation_from_edges(Forward& fwd, const EdgeSet& edges, std::size_t n) {
  Propagation prop;
  prop.neighbor_mean = fwd.constant(neighbor_mean_matrix(edges, n));
  prop.normalized_adj = fwd.constant(normalized_adjacency(adjacency_from_edges(edges, n)));
  return prop;
}

Propagation propagation_from_attention(const ad::Value& attention_adjacency) {
  // rows already sum to 1, so the matrix serves as both mean and propagation
  return Propagation{attention_adjacency, attention_adjacency};
}

GcStackParams make_gc_stack_params(ParameterSet& params, const GcStackConfig& config,
                                   int input_dim, const std::string& prefix,
                                   std::mt19937_64& rng) {
  if (config.num_layers < 1) {
    throw ConfigError("gc stack needs at least one layer, got " +
                      std::to_string(config.num_layers));
  }
  if (config.hidden_dim < 2 || config.hidden_dim % 2 != 0) {
    throw ConfigError("gc hidden_dim must be a positive even number, got " +
                      std::to_string(config.hidden_dim));
  }
  GcStackParams out;
  const std::size_t hidden = static_cast<std::size_t>(config.hidden_dim);
  std::size_t d_in = static_cast<std::size_t>(input_dim);
  if (config.kind == GcKind::kSpatial) {
    for (int l = 0; l < config.num_layers; ++l) {
      const std::string base = prefix + ".gc" + std::to_string(l + 1);
      SpatialLayerParams layer;
      layer.w_self = &params.create(base + ".w_self", xavier(d_in, hidden / 2, rng));
      layer.w_neigh = &params.create(base + ".w_neigh", xavier(d_in, hidden / 2, rng));
      out.spatial.push_back(layer);
      d_in = hidden;
    }
  } else {
    for (int l = 0; l < config.num_layers; ++l) {
      const std::string base = prefix + ".gc" + std::to_string(l + 1);
      out.spectral.push_back(&params.create(base + ".w", xavier(d_in, hidden, rng)));
      d_in = hidden;
    }
    const std::size_t concat = hidden * static_cast<std::size_t>(config.num_layers);
    const std::size_t out_dim = static_cast<std::size_t>(config.spectral_shortcut_out_dim);
    out.shortcut_w = &params.create(prefix + ".shortcut.w", xavier(concat, out_dim, rng));
    out.shortcut_b = &params.create(prefix + ".shortcut.b", Matrix(1, out_dim));
  }
  return out;
}

ad::Value spatial_layer(Forward& fwd, const ad::Value& h_prev, const ad::Value& neighbor_mean,
                        const SpatialLayerParams& params) {
  ad::Value own = ad::matmul(h_prev, fwd.use(*params.w_self));
  ad::Value agg = ad::matmul(neighbor_mean, h_prev);
  ad::Value nbr = ad::matmul(agg, fwd.use(*params.w_neigh));
  return ad::relu(ad::concat_cols(own, nbr));
}

ad::Value spectral_layer(Forward& fwd, const ad::Value& h_prev, const ad::Value& normalized_adj,
                         Parameter& weight) {
  return ad::relu(ad::matmul(ad::matmul(normalized_adj, h_prev), fwd.use(weight)));
}

ad::Value run_gc_stack(Forward& fwd, const ad::Value& h0, const Propagation& prop,
                       const GcStackConfig& config, const GcStackParams& params) {
  if (config.kind == GcKind::kSpatial) {
    ad::Value h = h0;
    for (const auto& layer : params.spatial) {
      h = spatial_layer(fwd, h, prop.neighbor_mean, layer);
    }
    return h;
  }
  ad::Value h = h0;
  ad::Value cat;
  for (Parameter* w : params.spectral) {
    h = spectral_layer(fwd, h, prop.normalized_adj, *w);
    cat = cat.valid() ? ad::concat_cols(cat, h) : h;
  }
  return ad::add(ad::matmul(cat, fwd.use(*params.shortcut_w)), fwd.use(*params.shortcut_b));
}

int gc_output_dim(const GcStackConfig& config) {
  return config.kind == GcKind::kSpatial ? config.hidden_dim
                                         : config.spectral_shortcut_out_dim;
}

}  // namespace gpnet
