#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gpnet {

struct GalleryItem {
  std::vector<double> feature;
  int identity = 0;
  int camera = -1;  // negative: unknown
};

struct QueryItem {
  std::vector<double> feature;
  int identity = 0;
  int camera = -1;
  // Gallery index to skip for this query (its own entry in leave-one-out
  // evaluation); negative disables the exclusion.
  int exclude_gallery_index = -1;
};

struct EvalOptions {
  bool same_camera_exclusion = false;
  std::vector<int> cmc_ranks{1, 5, 20};
};

struct MetricReport {
  double mean_ap = 0.0;
  std::map<int, double> cmc;  // rank -> hit fraction
  int evaluated = 0;
  int skipped = 0;  // queries with no valid match after exclusions
};

// Gallery indices by ascending Euclidean distance; ties by gallery index.
std::vector<int> rank_gallery(const std::vector<double>& query,
                              const std::vector<GalleryItem>& gallery);

MetricReport evaluate(const std::vector<QueryItem>& queries,
                      const std::vector<GalleryItem>& gallery, const EvalOptions& options);

void write_metric_csv(const std::vector<std::pair<std::string, MetricReport>>& rows,
                      const std::string& path);
// Aligned text table: one row per method, columns mAP / Rank1 / Rank5 / Rank20.
std::string format_metric_table(const std::vector<std::pair<std::string, MetricReport>>& rows);

}  // namespace gpnet
