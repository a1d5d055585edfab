#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpnet/matrix.hpp"

namespace gpnet {

// A sequence of T per-frame feature maps of shape w x h x c, stored
// height-major: entry (t, y, x, ch) sits at ((t*h + y)*w + x)*c + ch.
struct FeatureMapSequence {
  std::size_t t_frames = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  std::vector<double> data;
  int identity_label = 0;
  std::optional<int> camera_id;

  double at(std::size_t t, std::size_t y, std::size_t x, std::size_t ch) const {
    return data[((t * height + y) * width + x) * channels + ch];
  }
  double& at(std::size_t t, std::size_t y, std::size_t x, std::size_t ch) {
    return data[((t * height + y) * width + x) * channels + ch];
  }
  std::size_t value_count() const { return t_frames * width * height * channels; }
};

// GPFM ingestion file: magic "GPFM"; header T, w, h, c, identity_label as
// u64 LE; then T*w*h*c float32 LE values in frame-major, row-major,
// channel-last order.
void write_gpfm(const FeatureMapSequence& seq, const std::string& path);
FeatureMapSequence read_gpfm(const std::string& path);

// Manifest: one "path<space>identity" line per sequence. Relative paths are
// resolved against the manifest's directory.
struct ManifestEntry {
  std::string path;
  int identity_label = 0;
};
std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::vector<ManifestEntry>& entries, const std::string& path);
std::vector<FeatureMapSequence> load_dataset(const std::string& manifest_path);

}  // namespace gpnet
