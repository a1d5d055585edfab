// Command-line entry point: synthetic data generation, training, retrieval
// evaluation, pooling inspection, and ablation sweeps.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gpnet/ablate.hpp"
#include "gpnet/checkpoint.hpp"
#include "gpnet/error.hpp"
#include "gpnet/eval.hpp"
#include "gpnet/log.hpp"
#include "gpnet/run_config.hpp"
#include "gpnet/synthetic.hpp"
#include "gpnet/train.hpp"

namespace {

using namespace gpnet;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitMissingFile = 3;

struct CliOptions {
  std::string config_path;
  std::string out_override;
  std::string axis = "pooling";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 1;
};

RunConfig load_config(const CliOptions& opts) {
  RunConfig cfg = load_run_config(opts.config_path);
  if (!opts.out_override.empty()) cfg.output_dir = opts.out_override;
  if (opts.seed_set) {
    cfg.seed = opts.seed;
    cfg.synthetic.seed = opts.seed;
    cfg.train.seed = opts.seed;
  } else {
    cfg.synthetic.seed = cfg.seed;
    cfg.train.seed = cfg.seed;
  }
  return cfg;
}

int num_identities_of(const std::vector<FeatureMapSequence>& dataset) {
  int n = 0;
  for (const auto& seq : dataset) n = std::max(n, seq.identity_label + 1);
  return n;
}

int cmd_gen_data(const CliOptions& opts) {
  RunConfig cfg = load_config(opts);
  const std::string dir = (std::filesystem::path(cfg.output_dir) / "data").string();
  const std::string manifest = write_synthetic_dataset(cfg.synthetic, dir);
  log_info("wrote dataset manifest " + manifest);
  return kExitOk;
}

int cmd_train(const CliOptions& opts) {
  RunConfig cfg = load_config(opts);
  std::filesystem::create_directories(cfg.output_dir);
  const std::vector<FeatureMapSequence> dataset = load_dataset(cfg.manifest_path());
  if (dataset.empty()) throw ConfigError("dataset is empty: " + cfg.manifest_path());
  GpnetModel model(cfg.model, static_cast<int>(dataset.front().channels),
                   num_identities_of(dataset), cfg.seed);
  log_info("training on " + std::to_string(dataset.size()) + " sequences, " +
           std::to_string(model.params().element_count()) + " parameters");
  TrainResult result = train_model(model, dataset, cfg.train);
  const std::string history =
      (std::filesystem::path(cfg.output_dir) / "history.csv").string();
  write_history_csv(result.history, history);
  save_checkpoint(model.params(), cfg.checkpoint_path());
  log_info("wrote " + history + " and " + cfg.checkpoint_path());
  if (!result.history.empty()) {
    const EpochStats& last = result.history.back();
    std::printf("final epoch %d: total_loss=%.6f train_rank1=%.4f\n", last.epoch,
                last.total_loss, last.train_rank1);
  }
  return kExitOk;
}

int cmd_eval(const CliOptions& opts) {
  RunConfig cfg = load_config(opts);
  std::filesystem::create_directories(cfg.output_dir);
  const std::vector<FeatureMapSequence> dataset = load_dataset(cfg.manifest_path());
  if (dataset.empty()) throw ConfigError("dataset is empty: " + cfg.manifest_path());
  GpnetModel model(cfg.model, static_cast<int>(dataset.front().channels),
                   num_identities_of(dataset), cfg.seed);
  load_checkpoint(model.params(), cfg.checkpoint_path());

  std::vector<std::vector<double>> feats;
  feats.reserve(dataset.size());
  for (const auto& seq : dataset) feats.push_back(infer_representation(model, seq));

  EvalOptions eval_opts;
  eval_opts.same_camera_exclusion = cfg.eval.same_camera_exclusion;
  std::vector<QueryItem> queries;
  std::vector<GalleryItem> gallery;
  if (cfg.eval.mode == "loo") {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      gallery.push_back({feats[i], dataset[i].identity_label,
                         dataset[i].camera_id.value_or(-1)});
    }
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      queries.push_back({feats[i], dataset[i].identity_label,
                         dataset[i].camera_id.value_or(-1), static_cast<int>(i)});
    }
  } else {  // split: first queries_per_identity sequences of each identity query the rest
    std::map<int, int> seen;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const int k = seen[dataset[i].identity_label]++;
      if (k < cfg.eval.queries_per_identity) {
        queries.push_back({feats[i], dataset[i].identity_label,
                           dataset[i].camera_id.value_or(-1), -1});
      } else {
        gallery.push_back({feats[i], dataset[i].identity_label,
                           dataset[i].camera_id.value_or(-1)});
      }
    }
  }
  MetricReport report = evaluate(queries, gallery, eval_opts);
  const std::string label = std::string(to_string(cfg.model.gc.kind)) + "+" +
                            to_string(cfg.model.pool.method);
  std::vector<std::pair<std::string, MetricReport>> rows{{label, report}};
  write_metric_csv(rows, (std::filesystem::path(cfg.output_dir) / "metrics.csv").string());
  std::ofstream txt(std::filesystem::path(cfg.output_dir) / "metrics.txt");
  txt << format_metric_table(rows);
  std::printf("%s", format_metric_table(rows).c_str());
  if (report.skipped > 0) {
    std::printf("warning: %d queries had no valid gallery match\n", report.skipped);
  }
  return kExitOk;
}

int cmd_pool_demo(const CliOptions& opts) {
  RunConfig cfg = load_config(opts);
  std::filesystem::create_directories(cfg.output_dir);
  const std::vector<FeatureMapSequence> dataset = load_dataset(cfg.manifest_path());
  if (dataset.empty()) throw ConfigError("dataset is empty: " + cfg.manifest_path());
  GpnetModel model(cfg.model, static_cast<int>(dataset.front().channels),
                   num_identities_of(dataset), cfg.seed);
  if (std::filesystem::exists(cfg.checkpoint_path())) {
    load_checkpoint(model.params(), cfg.checkpoint_path());
    log_info("loaded " + cfg.checkpoint_path());
  } else {
    log_info("no checkpoint at " + cfg.checkpoint_path() + ", using fresh parameters");
  }
  Forward fwd(false);
  ModelOutput out = model.forward(fwd, dataset.front());
  for (const BranchOutput& branch : out.branches) {
    const std::string path =
        (std::filesystem::path(cfg.output_dir) /
         ("pool_scores_p" + std::to_string(branch.p) + ".csv"))
            .string();
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open for writing: " + path);
    std::fputs("node_index,frame,part,score\n", f);
    const std::vector<double> scores = branch.pooled.node_scores();
    for (std::size_t i = 0; i < branch.graph.node_count(); ++i) {
      const double score = i < scores.size() ? scores[i] : 0.0;
      std::fprintf(f, "%zu,%d,%d,%.12g\n", i, branch.graph.frame_index[i],
                   branch.graph.part_index[i], score);
    }
    std::fclose(f);
    log_info("wrote " + path);
  }
  return kExitOk;
}

int cmd_ablate(const CliOptions& opts) {
  RunConfig cfg = load_config(opts);
  std::filesystem::create_directories(cfg.output_dir);
  std::vector<AblationRow> rows = run_ablation_axis(cfg, opts.axis, opts.workers);
  std::vector<std::pair<std::string, MetricReport>> table;
  for (const AblationRow& row : rows) table.push_back({row.label, row.mean});
  std::printf("%s", format_metric_table(table).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-granularity graph-pooling video representation harness"};
  app.require_subcommand(1);

  CliOptions opts;
  auto add_common = [&](CLI::App* sub, bool needs_axis = false) {
    sub->add_option("--config", opts.config_path, "path to the JSON run configuration")
        ->required();
    sub->add_option("--out", opts.out_override, "override the configured output directory");
    sub->add_option("--seed", opts.seed, "override the configured seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    sub->add_option("--workers", opts.workers, "maximum concurrent ablation cells");
    if (needs_axis) {
      sub->add_option("--axis", opts.axis,
                      "ablation axis: pooling|gc|granularity|keep_ratio|adjacency");
    }
  };

  CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  add_common(gen);
  CLI::App* train = app.add_subcommand("train", "train a model and write a checkpoint");
  add_common(train);
  CLI::App* eval = app.add_subcommand("eval", "evaluate retrieval metrics from a checkpoint");
  add_common(eval);
  CLI::App* demo = app.add_subcommand("pool-demo", "emit per-node pooling scores as CSV");
  add_common(demo);
  CLI::App* ablate = app.add_subcommand("ablate", "sweep one ablation axis");
  add_common(ablate, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return kExitBadConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(opts);
    if (train->parsed()) return cmd_train(opts);
    if (eval->parsed()) return cmd_eval(opts);
    if (demo->parsed()) return cmd_pool_demo(opts);
    if (ablate->parsed()) return cmd_ablate(opts);
  } catch (const FileNotFoundError& e) {
    log_error(e.what());
    return kExitMissingFile;
  } catch (const ConfigError& e) {
    log_error(e.what());
    return kExitBadConfig;
  } catch (const std::exception& e) {
    log_error(e.what());
    return kExitFailure;
  }
  return kExitBadConfig;
}
