#include "gpnet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "gpnet/error.hpp"

namespace gpnet {

std::vector<int> rank_gallery(const std::vector<double>& query,
                              const std::vector<GalleryItem>& gallery) {
  if (gallery.empty()) throw ContractError("rank_gallery: empty gallery");
  std::vector<double> dist(gallery.size());
  for (std::size_t g = 0; g < gallery.size(); ++g) {
    if (gallery[g].feature.size() != query.size()) {
      throw ShapeError("rank_gallery: query has " + std::to_string(query.size()) +
                       " dims, gallery item " + std::to_string(g) + " has " +
                       std::to_string(gallery[g].feature.size()));
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < query.size(); ++k) {
      const double d = query[k] - gallery[g].feature[k];
      acc += d * d;
    }
    dist[g] = std::sqrt(acc);
  }
  std::vector<int> order(gallery.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dist[static_cast<std::size_t>(a)] != dist[static_cast<std::size_t>(b)]) {
      return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
    }
    return a < b;
  });
  return order;
}

MetricReport evaluate(const std::vector<QueryItem>& queries,
                      const std::vector<GalleryItem>& gallery, const EvalOptions& options) {
  MetricReport report;
  for (int r : options.cmc_ranks) report.cmc[r] = 0.0;
  double ap_sum = 0.0;

  for (const QueryItem& q : queries) {
    const std::vector<int> order =
        rank_gallery(q.feature, gallery);

    // walk the ranking, skipping excluded items, and record hit positions
    int rank = 0;
    int hits = 0;
    double precision_sum = 0.0;
    int first_hit_rank = -1;
    for (int g : order) {
      if (g == q.exclude_gallery_index) continue;
      const GalleryItem& item = gallery[static_cast<std::size_t>(g)];
      if (options.same_camera_exclusion && q.camera >= 0 && item.camera == q.camera &&
          item.identity == q.identity) {
        continue;
      }
      ++rank;
      if (item.identity == q.identity) {
        ++hits;
        precision_sum += static_cast<double>(hits) / static_cast<double>(rank);
        if (first_hit_rank < 0) first_hit_rank = rank;
      }
    }
    if (hits == 0) {
      ++report.skipped;
      continue;
    }
    ++report.evaluated;
    ap_sum += precision_sum / static_cast<double>(hits);
    for (auto& [r, v] : report.cmc) {
      if (first_hit_rank <= r) v += 1.0;
    }
  }
  if (report.evaluated > 0) {
    report.mean_ap = ap_sum / report.evaluated;
    for (auto& [r, v] : report.cmc) v /= report.evaluated;
  }
  return report;
}

void write_metric_csv(const std::vector<std::pair<std::string, MetricReport>>& rows,
                      const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + path);
  std::fputs("method,mAP,Rank1,Rank5,Rank20,evaluated,skipped\n", f);
  for (const auto& [label, r] : rows) {
    auto cmc_at = [&](int k) { return r.cmc.count(k) ? r.cmc.at(k) : 0.0; };
    std::fprintf(f, "%s,%.6f,%.6f,%.6f,%.6f,%d,%d\n", label.c_str(), r.mean_ap, cmc_at(1),
                 cmc_at(5), cmc_at(20), r.evaluated, r.skipped);
  }
  std::fclose(f);
}

std::string format_metric_table(const std::vector<std::pair<std::string, MetricReport>>& rows) {
  std::size_t label_w = 8;
  for (const auto& [label, r] : rows) label_w = std::max(label_w, label.size());
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s  %8s %8s %8s %8s\n", static_cast<int>(label_w),
                "method", "mAP", "Rank1", "Rank5", "Rank20");
  os << line;
  for (const auto& [label, r] : rows) {
    auto cmc_at = [&](int k) { return r.cmc.count(k) ? r.cmc.at(k) : 0.0; };
    std::snprintf(line, sizeof(line), "%-*s  %8.4f %8.4f %8.4f %8.4f\n",
                  static_cast<int>(label_w), label.c_str(), r.mean_ap, cmc_at(1), cmc_at(5),
                  cmc_at(20));
    os << line;
  }
  return os.str();
}

}  // namespace gpnet
