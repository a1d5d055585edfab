#pragma once

#include <string>
#include <vector>

#include "gpnet/eval.hpp"
#include "gpnet/run_config.hpp"

namespace gpnet {

// One point on an ablation axis: a label for the table row plus the model
// configuration it trains with.
struct AblationCell {
  std::string label;
  GpnetConfig model;
};

struct AblationRow {
  std::string label;
  MetricReport mean;                 // seed-averaged metrics
  std::vector<MetricReport> per_seed;
};

std::vector<AblationCell> ablation_cells(const std::string& axis, const GpnetConfig& base);

// Held-out evaluation of one configuration: train on the first
// train_sequences_per_identity sequences of every identity, query with the
// next eval_queries_per_identity, rank against the remaining sequences.
MetricReport run_ablation_cell(const GpnetConfig& model, const TrainConfig& train,
                               const AblateConfig& ablate,
                               const std::vector<FeatureMapSequence>& dataset,
                               std::uint64_t seed, const std::string& cell_dir);

// Sweeps the axis over ablate.seeds with up to `workers` concurrent cells;
// writes table_<axis>.csv and table_<axis>.txt under the output directory.
std::vector<AblationRow> run_ablation_axis(const RunConfig& config, const std::string& axis,
                                           int workers);

}  // namespace gpnet
