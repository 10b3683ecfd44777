#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frontend/function.hpp"

namespace uniasm {

enum class Serialization : uint8_t { Linear = 0, RandomWalk = 1, LongestWalk = 2 };

std::string to_string(Serialization s);
Serialization serialization_from_string(const std::string& s);

// Instruction texts in address order.
std::vector<std::string> serialize_linear(const Function& f);

// Instructions along a random entry-rooted block path: successors drawn
// uniformly among the not-yet-visited ones, stopping when none remain.
// Deterministic for a fixed seed. Requires a CFG.
std::vector<std::string> serialize_random_walk(const Function& f, uint64_t seed);

// Instructions along the entry-rooted block path maximizing total
// instruction count after back edges are removed (DFS classification with
// ascending successor order). Count ties resolve to the lexicographically
// smallest block-index sequence. Requires a CFG.
std::vector<std::string> serialize_longest_walk(const Function& f);

// Dispatch on the configured mode; walks derive their seed from `seed`.
std::vector<std::string> serialize(const Function& f, Serialization mode, uint64_t seed = 0);

// Index of the block containing the lowest instruction index.
size_t entry_block(const Function& f);

} // namespace uniasm
