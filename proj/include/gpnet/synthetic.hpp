#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpnet/feature_maps.hpp"

namespace gpnet {

// Generator for feature-map datasets with identity structure: each identity
// owns a base latent vector and per-part offsets that drive the horizontal
// bands; frames add temporal jitter and pixel noise, and occluded frames are
// replaced by pure noise.
struct SyntheticSpec {
  int num_identities = 8;
  int sequences_per_identity = 6;
  int t_frames = 8;
  int width = 4;
  int height = 8;
  int channels = 32;
  double identity_signal_strength = 1.0;
  double part_signal = 0.5;
  double noise_std = 0.05;
  double occlusion_prob = 0.0;
  std::uint64_t seed = 1;
};

// Values are quantised to float32 so datasets round-trip bit-exactly through
// the GPFM on-disk format.
std::vector<FeatureMapSequence> generate_synthetic(const SyntheticSpec& spec);

// Writes one GPFM file per sequence plus a manifest; returns the manifest path.
std::string write_synthetic_dataset(const SyntheticSpec& spec, const std::string& dir);

}  // namespace gpnet
