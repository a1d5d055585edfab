#include "gpnet/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "gpnet/error.hpp"

namespace gpnet {

namespace {

constexpr char kMagic[4] = {'G', 'P', 'N', '1'};

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

void write_f64(std::ostream& os, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  write_u64(os, bits);
}

double read_f64(std::istream& is) {
  std::uint64_t bits = read_u64(is);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace

void save_checkpoint(const ParameterSet& params, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path);
  os.write(kMagic, 4);
  for (const auto& p : params) {
    write_u64(os, p->name.size());
    os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    write_u64(os, p->value.rows());
    write_u64(os, p->value.cols());
    for (std::size_t i = 0; i < p->value.size(); ++i) write_f64(os, p->value.data()[i]);
  }
  if (!os) throw IoError("checkpoint write failed: " + path);
}

void load_checkpoint(ParameterSet& params, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FileNotFoundError("checkpoint not found: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("not a GPN1 checkpoint: " + path);
  }
  std::size_t loaded = 0;
  while (true) {
    std::uint64_t name_len = read_u64(is);
    if (is.eof()) break;
    if (!is || name_len > (1u << 20)) throw IoError("corrupt checkpoint record in " + path);
    std::string name(name_len, '\0');
    is.read(name.data(), static_cast<std::streamsize>(name_len));
    std::uint64_t rows = read_u64(is);
    std::uint64_t cols = read_u64(is);
    if (!is) throw IoError("corrupt checkpoint record in " + path);
    Parameter* p = params.find(name);
    if (!p) throw IoError("checkpoint parameter '" + name + "' unknown to this model");
    if (p->value.rows() != rows || p->value.cols() != cols) {
      throw ShapeError("checkpoint parameter '" + name + "' has shape " + std::to_string(rows) +
                       "x" + std::to_string(cols) + ", model expects " + p->value.shape_str());
    }
    for (std::uint64_t i = 0; i < rows * cols; ++i) p->value.data()[i] = read_f64(is);
    if (!is) throw IoError("corrupt checkpoint payload in " + path);
    ++loaded;
  }
  if (loaded != params.size()) {
    throw IoError("checkpoint holds " + std::to_string(loaded) + " parameters, model has " +
                  std::to_string(params.size()));
  }
}

}  // namespace gpnet
