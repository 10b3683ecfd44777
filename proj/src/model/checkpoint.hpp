#pragma once

#include <string>

#include "model/params.hpp"

namespace uniasm {

// Versioned binary container: magic "UASM", u32 format version, the six u32
// ModelConfig fields, then each tensor as u32 name length, name bytes, u32
// rank, u64 dims, row-major little-endian float32 data. Round-trips
// bit-exactly.
void save_checkpoint(const std::string& path, const Parameters<float>& params);
Parameters<float> load_checkpoint(const std::string& path);

} // namespace uniasm
