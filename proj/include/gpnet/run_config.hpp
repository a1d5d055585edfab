#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpnet/model.hpp"
#include "gpnet/synthetic.hpp"
#include "gpnet/train.hpp"

namespace gpnet {

struct EvalConfig {
  std::string checkpoint;           // empty: <output_dir>/checkpoint.gpn
  std::string mode = "loo";         // "loo" or "split"
  int queries_per_identity = 2;     // split mode only
  bool same_camera_exclusion = false;
};

struct AblateConfig {
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int epochs = 12;
  int train_sequences_per_identity = 4;
  int eval_queries_per_identity = 2;
};

// The whole experiment surface in one document. Every key is optional and
// defaults to the values below; unknown keys are rejected with the offending
// key path in the error.
struct RunConfig {
  std::uint64_t seed = 7;
  std::string output_dir = "runs/default";
  std::string manifest;  // empty: <output_dir>/data/manifest.txt
  SyntheticSpec synthetic;
  GpnetConfig model;
  TrainConfig train;
  EvalConfig eval;
  AblateConfig ablate;

  std::string manifest_path() const;
  std::string checkpoint_path() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

const char* to_string(PoolMethod method);
const char* to_string(GcKind kind);
const char* to_string(AdjacencyVariant variant);

}  // namespace gpnet
