#include "gpnet/synthetic.hpp"

#include <algorithm>
#include <filesystem>
#include <random>

#include "gpnet/error.hpp"

namespace gpnet {

std::vector<FeatureMapSequence> generate_synthetic(const SyntheticSpec& spec) {
  if (spec.num_identities < 1 || spec.sequences_per_identity < 1) {
    throw ConfigError("synthetic spec needs at least one identity and one sequence");
  }
  if (spec.t_frames < 1 || spec.width < 1 || spec.height < 1 || spec.channels < 1) {
    throw ConfigError("synthetic spec has a non-positive dimension");
  }
  if (spec.occlusion_prob < 0.0 || spec.occlusion_prob > 1.0) {
    throw ConfigError("occlusion_prob must lie in [0, 1]");
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const std::size_t h = static_cast<std::size_t>(spec.height);
  const std::size_t w = static_cast<std::size_t>(spec.width);
  const std::size_t c = static_cast<std::size_t>(spec.channels);
  const std::size_t t_frames = static_cast<std::size_t>(spec.t_frames);
  // latent part grid: the finest granularity the map height supports, up to 8
  const std::size_t parts = std::min<std::size_t>(8, h);
  const double occlusion_std = spec.identity_signal_strength + spec.part_signal;

  // per-identity latents, drawn before any frame noise so identity content
  // is independent of sequence count
  std::vector<std::vector<double>> base(static_cast<std::size_t>(spec.num_identities));
  std::vector<std::vector<double>> part_offset(static_cast<std::size_t>(spec.num_identities));
  for (int id = 0; id < spec.num_identities; ++id) {
    auto& b = base[static_cast<std::size_t>(id)];
    b.resize(c);
    for (std::size_t ch = 0; ch < c; ++ch) b[ch] = spec.identity_signal_strength * unit(rng);
    auto& o = part_offset[static_cast<std::size_t>(id)];
    o.resize(parts * c);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = spec.part_signal * unit(rng);
  }

  std::vector<FeatureMapSequence> out;
  out.reserve(static_cast<std::size_t>(spec.num_identities * spec.sequences_per_identity));
  std::vector<double> jitter(c);
  for (int id = 0; id < spec.num_identities; ++id) {
    for (int s = 0; s < spec.sequences_per_identity; ++s) {
      FeatureMapSequence seq;
      seq.t_frames = t_frames;
      seq.width = w;
      seq.height = h;
      seq.channels = c;
      seq.identity_label = id;
      seq.data.resize(seq.value_count());
      for (std::size_t t = 0; t < t_frames; ++t) {
        const bool occluded = coin(rng) < spec.occlusion_prob;
        for (std::size_t ch = 0; ch < c; ++ch) jitter[ch] = spec.noise_std * unit(rng);
        for (std::size_t y = 0; y < h; ++y) {
          const std::size_t part = y * parts / h;
          for (std::size_t x = 0; x < w; ++x) {
            for (std::size_t ch = 0; ch < c; ++ch) {
              double v;
              if (occluded) {
                v = occlusion_std * unit(rng);
              } else {
                v = base[static_cast<std::size_t>(id)][ch] +
                    part_offset[static_cast<std::size_t>(id)][part * c + ch] + jitter[ch] +
                    spec.noise_std * unit(rng);
              }
              // quantise so GPFM round-trips are exact
              seq.at(t, y, x, ch) = static_cast<double>(static_cast<float>(v));
            }
          }
        }
      }
      out.push_back(std::move(seq));
    }
  }
  return out;
}

std::string write_synthetic_dataset(const SyntheticSpec& spec, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create dataset directory " + dir + ": " + ec.message());

  const std::vector<FeatureMapSequence> dataset = generate_synthetic(spec);
  std::vector<ManifestEntry> entries;
  int per_identity = 0;
  int last_id = -1;
  for (const FeatureMapSequence& seq : dataset) {
    per_identity = seq.identity_label == last_id ? per_identity + 1 : 0;
    last_id = seq.identity_label;
    char name[64];
    std::snprintf(name, sizeof(name), "id%04d_seq%02d.gpfm", seq.identity_label, per_identity);
    const std::string path = (std::filesystem::path(dir) / name).string();
    write_gpfm(seq, path);
    entries.push_back({name, seq.identity_label});
  }
  const std::string manifest = (std::filesystem::path(dir) / "manifest.txt").string();
  write_manifest(entries, manifest);
  return manifest;
}

}  // namespace gpnet
