#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "frontend/function.hpp"
#include "frontend/serialize.hpp"
#include "tokenizer/tokenizer.hpp"
#include "tokenizer/vocab.hpp"

namespace uniasm {

struct PairSample {
    std::vector<std::string> first;
    std::vector<std::string> second;
    std::string project;
    std::string func_name;
    VariantKey first_key;
    VariantKey second_key;
};

// Layout: CLS, first tokens, SEP [, second tokens, SEP]. Segment ids are 0
// through the first SEP inclusive and 1 afterwards; positions are implicit
// 0..len-1.
struct PackedSequence {
    std::vector<int32_t> ids;
    std::vector<int8_t> segments;
    uint32_t len_first = 0;
    uint32_t len_second = 0;

    size_t size() const { return ids.size(); }
};

struct DatasetRecord {
    PackedSequence packed;
    std::string project;
    std::string func_name;
    VariantKey first_key;
    VariantKey second_key;
};

struct DatasetHeader {
    std::string vocab_hash;
    size_t max_sl = 0;
    TokenizerMode tokenizer = TokenizerMode::Full;
    Serialization serialization = Serialization::Linear;
};

// Cross-variant similar-pair grid: 6 same-compiler opt combinations each for
// GCC and Clang, all 16 GCC x Clang combinations, and per obfuscation the 4
// plain-vs-obfuscated OLLVM pairs at matching opt levels.
std::vector<std::pair<VariantKey, VariantKey>> enumerate_pairs(
    const std::vector<VariantKey>& available);

bool filter_small(const Function& f, size_t min_instructions = 10);

// Each input pair is followed immediately by its swapped copy.
std::vector<PairSample> augment_swap(const std::vector<PairSample>& pairs);

// Over-length pairs share the token budget MaxSL-3 equally, the odd leftover
// slot going to the first function; a side under its budget donates the
// surplus to the other.
PackedSequence pack_pair(const std::vector<std::string>& first,
                         const std::vector<std::string>& second, const Vocabulary& vocab,
                         size_t max_sl);

PackedSequence pack_single(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                           size_t max_sl);

// Adjacent (pair, swapped pair) duos travel as one shuffling unit so both
// sides land in the same split.
std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> split_shuffle(
    const std::vector<DatasetRecord>& samples, double ratio, uint64_t seed);

// Normalize, serialize, tokenize. The walk seed is derived from the function
// identity so rebuilding the corpus reproduces the same streams.
std::vector<std::string> function_tokens(const Function& f, TokenizerMode mode,
                                         Serialization serialization, uint64_t seed);

struct DatasetBuildConfig {
    TokenizerMode tokenizer_mode = TokenizerMode::Full;
    Serialization serialization = Serialization::Linear;
    size_t max_sl = 256;
    size_t min_instructions = 10;
    uint64_t seed = 0;
};

std::vector<DatasetRecord> build_dataset(const std::vector<Function>& corpus,
                                         const Vocabulary& vocab,
                                         const DatasetBuildConfig& config);

void save_dataset(const std::string& path, const DatasetHeader& header,
                  const std::vector<DatasetRecord>& records);
std::pair<DatasetHeader, std::vector<DatasetRecord>> load_dataset(const std::string& path);

} // namespace uniasm
