#pragma once

#include <string>

#include "gpnet/params.hpp"

namespace gpnet {

// Flat binary checkpoint. Layout: magic "GPN1", then one record per
// parameter in registry order: name length (u64 LE), UTF-8 name, rows (u64
// LE), cols (u64 LE), rows*cols doubles (LE, row-major).
void save_checkpoint(const ParameterSet& params, const std::string& path);

// Loads values into an existing registry; every stored name must resolve and
// shapes must match.
void load_checkpoint(ParameterSet& params, const std::string& path);

}  // namespace gpnet
