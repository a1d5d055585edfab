#include "gpnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "gpnet/error.hpp"
#include "gpnet/log.hpp"
#include "gpnet/optim.hpp"

namespace gpnet {

namespace {

struct PkSampler {
  // identity -> sequence indices, in dataset order
  std::vector<int> identity_of;
  std::vector<std::vector<int>> groups;
  std::vector<int> group_labels;

  explicit PkSampler(const std::vector<FeatureMapSequence>& dataset) {
    std::map<int, std::vector<int>> by_identity;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      by_identity[dataset[i].identity_label].push_back(static_cast<int>(i));
    }
    for (auto& [label, idx] : by_identity) {
      group_labels.push_back(label);
      groups.push_back(std::move(idx));
    }
  }

  // One batch of P*K dataset indices: P identities, K sequences each.
  std::vector<int> sample(int p, int k, std::mt19937_64& rng) const {
    std::vector<int> group_order(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) group_order[i] = static_cast<int>(i);
    std::shuffle(group_order.begin(), group_order.end(), rng);
    std::vector<int> batch;
    batch.reserve(static_cast<std::size_t>(p) * static_cast<std::size_t>(k));
    for (int gi = 0; gi < p; ++gi) {
      const auto& seqs = groups[static_cast<std::size_t>(group_order[static_cast<std::size_t>(gi)])];
      std::vector<int> order = seqs;
      std::shuffle(order.begin(), order.end(), rng);
      for (int s = 0; s < k; ++s) {
        if (s < static_cast<int>(order.size())) {
          batch.push_back(order[static_cast<std::size_t>(s)]);
        } else {
          // identity has fewer than K sequences: resample with replacement
          std::uniform_int_distribution<std::size_t> pick(0, seqs.size() - 1);
          batch.push_back(seqs[pick(rng)]);
        }
      }
    }
    return batch;
  }
};

double leave_one_out_rank1(const std::vector<std::vector<double>>& feats,
                           const std::vector<int>& labels) {
  if (feats.size() < 2) return 0.0;
  int hits = 0;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    double best = 0.0;
    std::size_t best_j = i;
    for (std::size_t j = 0; j < feats.size(); ++j) {
      if (j == i) continue;
      double acc = 0.0;
      for (std::size_t k = 0; k < feats[i].size(); ++k) {
        const double d = feats[i][k] - feats[j][k];
        acc += d * d;
      }
      if (best_j == i || acc < best) {
        best = acc;
        best_j = j;
      }
    }
    if (labels[best_j] == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(feats.size());
}

}  // namespace

double scheduled_lr(const TrainConfig& config, int epoch) {
  double lr = config.lr;
  const int warmup_epochs =
      static_cast<int>(std::llround(config.warmup_fraction * config.epochs));
  if (warmup_epochs > 0 && epoch < warmup_epochs) {
    lr *= static_cast<double>(epoch + 1) / static_cast<double>(warmup_epochs);
  }
  if (config.lr_decay_every > 0) {
    lr *= std::pow(config.lr_decay_factor, epoch / config.lr_decay_every);
  }
  return lr;
}

TrainResult train_model(GpnetModel& model, const std::vector<FeatureMapSequence>& dataset,
                        const TrainConfig& config) {
  if (config.batch_p < 2 || config.batch_k < 2) {
    throw ConfigError("PK sampling needs batch_p >= 2 and batch_k >= 2");
  }
  PkSampler sampler(dataset);
  if (static_cast<int>(sampler.groups.size()) < config.batch_p) {
    throw ConfigError("dataset has " + std::to_string(sampler.groups.size()) +
                      " identities, PK sampling needs at least " +
                      std::to_string(config.batch_p));
  }

  const std::size_t batch_size =
      static_cast<std::size_t>(config.batch_p) * static_cast<std::size_t>(config.batch_k);
  const int batches_per_epoch = static_cast<int>(
      (dataset.size() + batch_size - 1) / batch_size);

  std::mt19937_64 rng(config.seed);
  Adam optimizer(AdamConfig{0.9, 0.999, 1e-8, config.weight_decay});
  TrainResult result;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = scheduled_lr(config, epoch);
    EpochStats stats;
    stats.epoch = epoch;
    stats.lr = lr;

    std::vector<std::vector<double>> epoch_feats;
    std::vector<int> epoch_labels;
    for (int b = 0; b < batches_per_epoch; ++b) {
      const std::vector<int> batch = sampler.sample(config.batch_p, config.batch_k, rng);
      Forward fwd(true);
      std::vector<ad::Value> reprs;
      std::vector<int> labels;
      reprs.reserve(batch.size());
      for (int idx : batch) {
        const FeatureMapSequence& seq = dataset[static_cast<std::size_t>(idx)];
        reprs.push_back(model.forward(fwd, seq).representation);
        labels.push_back(seq.identity_label);
      }
      ad::Value stacked = ad::concat_rows(reprs);
      ad::Value logits = model.classify(fwd, stacked);
      ad::Value trip = triplet_loss_batch_hard(reprs, labels, config.margin);
      ad::Value ident = identity_loss(logits, labels);
      ad::Value total = ad::add(trip, ident);
      fwd.tape().backward(total);
      optimizer.step(model.params(), fwd, lr);

      stats.triplet_loss += trip.data()(0, 0);
      stats.identity_loss += ident.data()(0, 0);
      stats.total_loss += total.data()(0, 0);
      for (std::size_t i = 0; i < reprs.size(); ++i) {
        const Matrix& f = reprs[i].data();
        epoch_feats.emplace_back(f.data(), f.data() + f.size());
        epoch_labels.push_back(labels[i]);
      }
    }
    stats.triplet_loss /= batches_per_epoch;
    stats.identity_loss /= batches_per_epoch;
    stats.total_loss /= batches_per_epoch;
    stats.train_rank1 = leave_one_out_rank1(epoch_feats, epoch_labels);
    result.history.push_back(stats);
    log_debug("epoch " + std::to_string(epoch) + " total loss " +
              std::to_string(stats.total_loss) + " rank1 " + std::to_string(stats.train_rank1));
  }
  return result;
}

void write_history_csv(const std::vector<EpochStats>& history, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + path);
  std::fputs("epoch,lr,triplet_loss,identity_loss,total_loss,train_rank1\n", f);
  for (const EpochStats& s : history) {
    std::fprintf(f, "%d,%.12g,%.12g,%.12g,%.12g,%.12g\n", s.epoch, s.lr, s.triplet_loss,
                 s.identity_loss, s.total_loss, s.train_rank1);
  }
  std::fclose(f);
}

std::vector<double> infer_representation(const GpnetModel& model, const FeatureMapSequence& seq) {
  Forward fwd(false);
  ModelOutput out = model.forward(fwd, seq);
  const Matrix& f = out.representation.data();
  return std::vector<double>(f.data(), f.data() + f.size());
}

}  // namespace gpnet
