#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace uniasm {

// Reads a whole file into memory. Throws RuntimeFault on I/O failure.
std::string read_file(const std::string& path);

// Writes data to `path` atomically: the bytes go to a sibling temp file which
// is renamed over the destination, so a failed run leaves no partial artifact.
void write_file_atomic(const std::string& path, const std::string& data);

// FNV-1a over the file bytes, rendered as 16 hex digits. Used to stamp
// derived artifacts with the identity of their inputs.
std::string file_fingerprint(const std::string& path);

uint64_t fnv1a64(const void* data, size_t len);

} // namespace uniasm
