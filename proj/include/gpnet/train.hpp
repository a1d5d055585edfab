#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpnet/feature_maps.hpp"
#include "gpnet/model.hpp"

namespace gpnet {

struct TrainConfig {
  int epochs = 50;
  double lr = 3e-4;
  double weight_decay = 5e-4;
  double margin = 0.3;
  double warmup_fraction = 0.1;  // linear ramp over this fraction of epochs
  int lr_decay_every = 100;      // step decay period, in epochs
  double lr_decay_factor = 0.1;
  int batch_p = 8;  // identities per batch
  int batch_k = 4;  // sequences per identity
  std::uint64_t seed = 1;
};

struct EpochStats {
  int epoch = 0;
  double lr = 0.0;
  double triplet_loss = 0.0;
  double identity_loss = 0.0;
  double total_loss = 0.0;
  double train_rank1 = 0.0;
};

// Warm-up ramp multiplied by the step decay; epochs are zero-based.
double scheduled_lr(const TrainConfig& config, int epoch);

struct TrainResult {
  std::vector<EpochStats> history;
};

// PK-sampled batches, triplet + identity objective, Adam updates. The
// train_rank1 column is a leave-one-out nearest-neighbour accuracy over the
// representations produced by this epoch's batches.
TrainResult train_model(GpnetModel& model, const std::vector<FeatureMapSequence>& dataset,
                        const TrainConfig& config);

void write_history_csv(const std::vector<EpochStats>& history, const std::string& path);

// Representation vector of one sequence without gradient bookkeeping.
std::vector<double> infer_representation(const GpnetModel& model, const FeatureMapSequence& seq);

}  // namespace gpnet
