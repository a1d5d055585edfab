#include "gpnet/run_config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gpnet/error.hpp"
#include "json.hpp"

namespace gpnet {

namespace {

using nlohmann::json;

// Tracks the key path for error messages and rejects unknown keys.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : obj_(j), path_(std::move(path)) {
    if (!obj_.is_object()) {
      throw ConfigError("config key '" + path_ + "' must be an object");
    }
  }

  ~StrictObject() = default;

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) {
        throw ConfigError("unknown config key '" + join(key) + "'");
      }
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const json& at(const std::string& key) { return obj_.at(key); }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + join(key) + "' has the wrong type");
    }
  }

  void read_positive(const std::string& key, int& out) {
    read(key, out);
    if (out <= 0) throw ConfigError("config key '" + join(key) + "' must be positive");
  }

  std::string join(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

PoolMethod parse_pool_method(const std::string& s, const std::string& key) {
  if (s == "mean") return PoolMethod::kMean;
  if (s == "max") return PoolMethod::kMax;
  if (s == "diffpool") return PoolMethod::kDiffPool;
  if (s == "sagpool") return PoolMethod::kSagPool;
  if (s == "mhfapool") return PoolMethod::kMhfaPool;
  throw ConfigError("config key '" + key + "': unknown pooling method '" + s + "'");
}

GcKind parse_gc_kind(const std::string& s, const std::string& key) {
  if (s == "spatial") return GcKind::kSpatial;
  if (s == "spectral") return GcKind::kSpectral;
  throw ConfigError("config key '" + key + "': unknown gc kind '" + s + "'");
}

AdjacencyVariant parse_adjacency(const std::string& s, const std::string& key) {
  if (s == "dna") return AdjacencyVariant::kDna;
  if (s == "tna") return AdjacencyVariant::kTna;
  if (s == "ena") return AdjacencyVariant::kEna;
  if (s == "self_attention") return AdjacencyVariant::kSelfAttention;
  throw ConfigError("config key '" + key + "': unknown adjacency variant '" + s + "'");
}

void parse_synthetic(const json& j, SyntheticSpec& spec) {
  StrictObject o(j, "synthetic");
  o.read_positive("num_identities", spec.num_identities);
  o.read_positive("sequences_per_identity", spec.sequences_per_identity);
  o.read_positive("t_frames", spec.t_frames);
  o.read_positive("width", spec.width);
  o.read_positive("height", spec.height);
  o.read_positive("channels", spec.channels);
  o.read("identity_signal_strength", spec.identity_signal_strength);
  o.read("part_signal", spec.part_signal);
  o.read("noise_std", spec.noise_std);
  o.read("occlusion_prob", spec.occlusion_prob);
  o.read("seed", spec.seed);
  o.finish();
}

void parse_model(const json& j, GpnetConfig& model) {
  StrictObject o(j, "model");
  if (o.has("granularities")) {
    try {
      model.granularities = o.at("granularities").get<std::vector<int>>();
    } catch (const json::exception&) {
      throw ConfigError("config key 'model.granularities' must be an integer array");
    }
  }
  std::string s;
  if (o.has("gc_kind")) {
    s = o.at("gc_kind").get<std::string>();
    model.gc.kind = parse_gc_kind(s, "model.gc_kind");
  }
  o.read_positive("gc_layers", model.gc.num_layers);
  o.read_positive("gc_hidden_dim", model.gc.hidden_dim);
  o.read_positive("spectral_shortcut_out_dim", model.gc.spectral_shortcut_out_dim);
  if (o.has("pool_method")) {
    s = o.at("pool_method").get<std::string>();
    model.pool.method = parse_pool_method(s, "model.pool_method");
  }
  o.read("keep_ratio", model.pool.keep_ratio);
  o.read_positive("power_iter_max", model.pool.power_iter_max);
  o.read("power_iter_tol", model.pool.power_iter_tol);
  if (o.has("adjacency")) {
    s = o.at("adjacency").get<std::string>();
    model.adjacency = parse_adjacency(s, "model.adjacency");
  }
  o.read("delta_t", model.delta_t);
  o.read("knn", model.knn);
  o.read_positive("t_frames", model.t_frames);
  o.read_positive("readout_dim_global", model.readout_dim_global);
  o.read_positive("readout_dim_part", model.readout_dim_part);
  o.finish();
}

void parse_train(const json& j, TrainConfig& train) {
  StrictObject o(j, "train");
  o.read_positive("epochs", train.epochs);
  o.read("lr", train.lr);
  o.read("weight_decay", train.weight_decay);
  o.read("margin", train.margin);
  o.read("warmup_fraction", train.warmup_fraction);
  o.read_positive("lr_decay_every", train.lr_decay_every);
  o.read("lr_decay_factor", train.lr_decay_factor);
  o.read_positive("batch_p", train.batch_p);
  o.read_positive("batch_k", train.batch_k);
  o.finish();
  if (train.lr <= 0.0) throw ConfigError("config key 'train.lr' must be positive");
  if (train.warmup_fraction < 0.0 || train.warmup_fraction > 1.0) {
    throw ConfigError("config key 'train.warmup_fraction' must lie in [0, 1]");
  }
}

void parse_eval(const json& j, EvalConfig& eval) {
  StrictObject o(j, "eval");
  o.read("checkpoint", eval.checkpoint);
  o.read("mode", eval.mode);
  o.read_positive("queries_per_identity", eval.queries_per_identity);
  o.read("same_camera_exclusion", eval.same_camera_exclusion);
  o.finish();
  if (eval.mode != "loo" && eval.mode != "split") {
    throw ConfigError("config key 'eval.mode' must be 'loo' or 'split'");
  }
}

void parse_ablate(const json& j, AblateConfig& ablate) {
  StrictObject o(j, "ablate");
  if (o.has("seeds")) {
    try {
      ablate.seeds = o.at("seeds").get<std::vector<std::uint64_t>>();
    } catch (const json::exception&) {
      throw ConfigError("config key 'ablate.seeds' must be an unsigned integer array");
    }
    if (ablate.seeds.empty()) throw ConfigError("config key 'ablate.seeds' must not be empty");
  }
  o.read_positive("epochs", ablate.epochs);
  o.read_positive("train_sequences_per_identity", ablate.train_sequences_per_identity);
  o.read_positive("eval_queries_per_identity", ablate.eval_queries_per_identity);
  o.finish();
}

}  // namespace

std::string RunConfig::manifest_path() const {
  if (!manifest.empty()) return manifest;
  return (std::filesystem::path(output_dir) / "data" / "manifest.txt").string();
}

std::string RunConfig::checkpoint_path() const {
  if (!eval.checkpoint.empty()) return eval.checkpoint;
  return (std::filesystem::path(output_dir) / "checkpoint.gpn").string();
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  StrictObject o(j, "");
  o.read("seed", cfg.seed);
  o.read("output_dir", cfg.output_dir);
  o.read("manifest", cfg.manifest);
  if (o.has("synthetic")) parse_synthetic(o.at("synthetic"), cfg.synthetic);
  if (o.has("model")) parse_model(o.at("model"), cfg.model);
  if (o.has("train")) parse_train(o.at("train"), cfg.train);
  if (o.has("eval")) parse_eval(o.at("eval"), cfg.eval);
  if (o.has("ablate")) parse_ablate(o.at("ablate"), cfg.ablate);
  o.finish();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FileNotFoundError("config not found: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_run_config(buf.str());
}

const char* to_string(PoolMethod method) {
  switch (method) {
    case PoolMethod::kMean: return "mean";
    case PoolMethod::kMax: return "max";
    case PoolMethod::kDiffPool: return "diffpool";
    case PoolMethod::kSagPool: return "sagpool";
    case PoolMethod::kMhfaPool: return "mhfapool";
  }
  return "?";
}

const char* to_string(GcKind kind) {
  return kind == GcKind::kSpatial ? "spatial" : "spectral";
}

const char* to_string(AdjacencyVariant variant) {
  switch (variant) {
    case AdjacencyVariant::kDna: return "dna";
    case AdjacencyVariant::kTna: return "tna";
    case AdjacencyVariant::kEna: return "ena";
    case AdjacencyVariant::kSelfAttention: return "self_attention";
  }
  return "?";
}

}  // namespace gpnet
