#include "gpnet/feature_maps.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gpnet/error.hpp"

namespace gpnet {

namespace {

constexpr char kMagic[4] = {'G', 'P', 'F', 'M'};

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_f32(std::ostream& os, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), 4);
}

float read_f32(std::istream& is) {
  unsigned char buf[4];
  is.read(reinterpret_cast<char*>(buf), 4);
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

}  // namespace

void write_gpfm(const FeatureMapSequence& seq, const std::string& path) {
  if (seq.data.size() != seq.value_count()) {
    throw ContractError("write_gpfm: payload has " + std::to_string(seq.data.size()) +
                        " values, header implies " + std::to_string(seq.value_count()));
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(kMagic, 4);
  write_u64(os, seq.t_frames);
  write_u64(os, seq.width);
  write_u64(os, seq.height);
  write_u64(os, seq.channels);
  write_u64(os, static_cast<std::uint64_t>(seq.identity_label));
  for (double v : seq.data) write_f32(os, static_cast<float>(v));
  if (!os) throw IoError("write failed: " + path);
}

FeatureMapSequence read_gpfm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FileNotFoundError("feature-map file not found: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("not a GPFM file: " + path);
  }
  FeatureMapSequence seq;
  seq.t_frames = read_u64(is);
  seq.width = read_u64(is);
  seq.height = read_u64(is);
  seq.channels = read_u64(is);
  seq.identity_label = static_cast<int>(read_u64(is));
  if (!is) throw IoError("truncated GPFM header: " + path);
  seq.data.resize(seq.value_count());
  for (std::size_t i = 0; i < seq.data.size(); ++i) seq.data[i] = read_f32(is);
  if (!is) throw IoError("truncated GPFM payload: " + path);
  return seq;
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FileNotFoundError("manifest not found: " + path);
  const auto base = std::filesystem::path(path).parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ManifestEntry e;
    if (!(ls >> e.path >> e.identity_label)) {
      throw IoError("malformed manifest line " + std::to_string(lineno) + " in " + path);
    }
    std::filesystem::path p(e.path);
    if (p.is_relative()) p = base / p;
    e.path = p.string();
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::vector<ManifestEntry>& entries, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  for (const auto& e : entries) os << e.path << " " << e.identity_label << "\n";
  if (!os) throw IoError("write failed: " + path);
}

std::vector<FeatureMapSequence> load_dataset(const std::string& manifest_path) {
  std::vector<FeatureMapSequence> out;
  for (const auto& e : read_manifest(manifest_path)) {
    FeatureMapSequence seq = read_gpfm(e.path);
    if (seq.identity_label != e.identity_label) {
      throw IoError("identity mismatch for " + e.path + ": manifest says " +
                    std::to_string(e.identity_label) + ", file says " +
                    std::to_string(seq.identity_label));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace gpnet
