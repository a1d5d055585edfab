#include "gpnet/ablate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "gpnet/checkpoint.hpp"
#include "gpnet/error.hpp"
#include "gpnet/log.hpp"
#include "gpnet/synthetic.hpp"
#include "gpnet/train.hpp"

namespace gpnet {

std::vector<AblationCell> ablation_cells(const std::string& axis, const GpnetConfig& base) {
  std::vector<AblationCell> cells;
  auto with = [&](const std::string& label, auto&& mutate) {
    GpnetConfig m = base;
    mutate(m);
    cells.push_back({label, std::move(m)});
  };
  if (axis == "pooling") {
    for (PoolMethod method : {PoolMethod::kMean, PoolMethod::kMax, PoolMethod::kDiffPool,
                              PoolMethod::kSagPool, PoolMethod::kMhfaPool}) {
      with(to_string(method), [method](GpnetConfig& m) { m.pool.method = method; });
    }
  } else if (axis == "gc") {
    for (GcKind kind : {GcKind::kSpatial, GcKind::kSpectral}) {
      with(to_string(kind), [kind](GpnetConfig& m) { m.gc.kind = kind; });
    }
  } else if (axis == "granularity") {
    const std::vector<std::vector<int>> sets{{1}, {1, 2}, {1, 2, 4}, {1, 2, 4, 8}};
    for (const auto& set : sets) {
      std::string label = "p{";
      for (std::size_t i = 0; i < set.size(); ++i) {
        label += (i ? "," : "") + std::to_string(set[i]);
      }
      label += "}";
      with(label, [&set](GpnetConfig& m) { m.granularities = set; });
    }
  } else if (axis == "keep_ratio") {
    for (double ratio : {1.0 / 4.0, 1.0 / 3.0, 1.0 / 2.0}) {
      char label[16];
      std::snprintf(label, sizeof(label), "1/%d", static_cast<int>(std::lround(1.0 / ratio)));
      with(label, [ratio](GpnetConfig& m) { m.pool.keep_ratio = ratio; });
    }
  } else if (axis == "adjacency") {
    for (AdjacencyVariant v :
         {AdjacencyVariant::kSelfAttention, AdjacencyVariant::kTna, AdjacencyVariant::kEna,
          AdjacencyVariant::kDna}) {
      with(to_string(v), [v](GpnetConfig& m) { m.adjacency = v; });
    }
  } else {
    throw ConfigError("unknown ablation axis '" + axis +
                      "' (expected pooling|gc|granularity|keep_ratio|adjacency)");
  }
  return cells;
}

namespace {

// Deterministic per-identity split into train / query / gallery slices.
struct Split {
  std::vector<FeatureMapSequence> train;
  std::vector<FeatureMapSequence> query;
  std::vector<FeatureMapSequence> gallery;
};

Split split_dataset(const std::vector<FeatureMapSequence>& dataset, int train_per_identity,
                    int query_per_identity) {
  std::map<int, int> seen;
  Split out;
  for (const FeatureMapSequence& seq : dataset) {
    const int k = seen[seq.identity_label]++;
    if (k < train_per_identity) {
      out.train.push_back(seq);
    } else if (k < train_per_identity + query_per_identity) {
      out.query.push_back(seq);
    } else {
      out.gallery.push_back(seq);
    }
  }
  if (out.query.empty() || out.gallery.empty()) {
    throw ConfigError("ablation split leaves no held-out query/gallery sequences; "
                      "increase synthetic.sequences_per_identity");
  }
  return out;
}

}  // namespace

MetricReport run_ablation_cell(const GpnetConfig& model_cfg, const TrainConfig& train_cfg,
                               const AblateConfig& ablate_cfg,
                               const std::vector<FeatureMapSequence>& dataset,
                               std::uint64_t seed, const std::string& cell_dir) {
  std::filesystem::create_directories(cell_dir);
  Split split =
      split_dataset(dataset, ablate_cfg.train_sequences_per_identity,
                    ablate_cfg.eval_queries_per_identity);

  int num_identities = 0;
  for (const auto& seq : split.train) {
    num_identities = std::max(num_identities, seq.identity_label + 1);
  }

  TrainConfig tc = train_cfg;
  tc.epochs = ablate_cfg.epochs;
  tc.seed = seed;
  GpnetModel model(model_cfg, static_cast<int>(split.train.front().channels), num_identities,
                   seed);
  TrainResult result = train_model(model, split.train, tc);
  write_history_csv(result.history, (std::filesystem::path(cell_dir) / "history.csv").string());

  std::vector<GalleryItem> gallery;
  for (const auto& seq : split.gallery) {
    gallery.push_back({infer_representation(model, seq), seq.identity_label, -1});
  }
  std::vector<QueryItem> queries;
  for (const auto& seq : split.query) {
    queries.push_back({infer_representation(model, seq), seq.identity_label, -1, -1});
  }
  MetricReport report = evaluate(queries, gallery, EvalOptions{});
  write_metric_csv({{"cell", report}},
                   (std::filesystem::path(cell_dir) / "metrics.csv").string());
  return report;
}

std::vector<AblationRow> run_ablation_axis(const RunConfig& config, const std::string& axis,
                                           int workers) {
  const std::vector<AblationCell> cells = ablation_cells(axis, config.model);
  const std::vector<std::uint64_t>& seeds = config.ablate.seeds;
  const std::filesystem::path root =
      std::filesystem::path(config.output_dir) / ("ablate_" + axis);
  std::filesystem::create_directories(root);

  // one dataset per seed, generated up front and shared read-only by cells
  std::vector<std::vector<FeatureMapSequence>> datasets;
  for (std::uint64_t seed : seeds) {
    SyntheticSpec spec = config.synthetic;
    spec.seed = seed;
    datasets.push_back(generate_synthetic(spec));
  }

  struct Job {
    std::size_t cell;
    std::size_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::size_t s = 0; s < seeds.size(); ++s) jobs.push_back({c, s});

  std::vector<std::vector<MetricReport>> reports(
      cells.size(), std::vector<MetricReport>(seeds.size()));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    while (true) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size() || failed.load()) return;
      const Job job = jobs[j];
      const AblationCell& cell = cells[job.cell];
      const std::string cell_dir =
          (root / cell.label / ("seed_" + std::to_string(seeds[job.seed]))).string();
      try {
        reports[job.cell][job.seed] =
            run_ablation_cell(cell.model, config.train, config.ablate, datasets[job.seed],
                              seeds[job.seed], cell_dir);
        log_info("ablate " + axis + " cell '" + cell.label + "' seed " +
                 std::to_string(seeds[job.seed]) + " mAP " +
                 std::to_string(reports[job.cell][job.seed].mean_ap));
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        failure = e.what();
        return;
      }
    }
  };

  const int thread_count =
      std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load()) throw Error("ablation cell failed: " + failure);

  std::vector<AblationRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    AblationRow row;
    row.label = cells[c].label;
    row.per_seed = reports[c];
    MetricReport mean;
    for (const MetricReport& r : reports[c]) {
      mean.mean_ap += r.mean_ap;
      for (const auto& [k, v] : r.cmc) mean.cmc[k] += v;
      mean.evaluated += r.evaluated;
      mean.skipped += r.skipped;
    }
    const double denom = static_cast<double>(seeds.size());
    mean.mean_ap /= denom;
    for (auto& [k, v] : mean.cmc) v /= denom;
    row.mean = mean;
    rows.push_back(std::move(row));
  }

  std::vector<std::pair<std::string, MetricReport>> table;
  for (const AblationRow& row : rows) table.push_back({row.label, row.mean});
  write_metric_csv(table, (root / ("table_" + axis + ".csv")).string());
  std::ofstream txt(root / ("table_" + axis + ".txt"));
  txt << format_metric_table(table);
  return rows;
}

}  // namespace gpnet
