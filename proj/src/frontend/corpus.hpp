#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "frontend/function.hpp"

namespace uniasm {

// Parses one corpus record (a JSON object, see docs/corpus format in the
// README). Validates monotonically increasing addresses, block partition and
// edge endpoints. `where` names the source (file:line) in error messages.
Function parse_function_record(const std::string& json_line, const std::string& where);

// Loads a line-delimited corpus file. Blank lines are skipped.
std::vector<Function> load_corpus(const std::string& path);

struct CorpusStats {
    size_t functions = 0;
    size_t instructions = 0;
    size_t with_cfg = 0;
    // Instruction-count buckets: [0-128], [129-256], [257-512], [513-1024], >1024.
    std::array<size_t, 5> length_buckets{};
    std::vector<std::pair<std::string, size_t>> functions_per_variant;
};

CorpusStats corpus_stats(const std::vector<Function>& corpus);

} // namespace uniasm
