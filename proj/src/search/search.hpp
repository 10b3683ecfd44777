#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "frontend/function.hpp"
#include "model/params.hpp"
#include "tokenizer/vocab.hpp"

namespace uniasm {

struct PoolLabel {
    std::string project;
    std::string func_name;
    VariantKey key;

    bool operator==(const PoolLabel&) const = default;
};

struct EmbeddingPool {
    Mat<float> matrix; // count x d
    std::vector<PoolLabel> labels;

    size_t size() const { return labels.size(); }
};

struct ScoredHit {
    size_t index = 0;
    double score = 0.0;
};

struct RecallReport {
    std::string task;
    size_t k = 0;
    size_t pool_size = 0;
    double recall = 0.0;
    std::vector<size_t> ranks; // 1-based rank of each query's ground truth
};

enum class TaskKind : uint8_t { XCom, XOpt, XObf };

// X-COM: GCC-opt queries against Clang-opt. X-OPT: compiler opt_src against
// opt_dst. X-OBF: plain OLLVM against one obfuscation at the same opt level.
struct TaskSpec {
    TaskKind kind = TaskKind::XCom;
    OptLevel opt = OptLevel::O0;         // XCom / XObf
    Compiler compiler = Compiler::Gcc;   // XOpt
    OptLevel opt_src = OptLevel::O0;     // XOpt
    OptLevel opt_dst = OptLevel::O3;     // XOpt
    Obfuscation obf = Obfuscation::Sub;  // XObf

    VariantKey source_variant() const;
    VariantKey target_variant() const;
    std::string name() const;
};

TaskSpec task_from_string(const std::string& s);

// Single-function inference: normalize/serialize/tokenize, pack CLS F SEP,
// bidirectional forward, embedding head. The raw (non-normalized) vector.
Vec<float> embed_function(const Function& f, const Parameters<float>& params,
                          const Vocabulary& vocab, TokenizerMode mode,
                          Serialization serialization, uint64_t seed);

EmbeddingPool build_pool(const std::vector<Function>& corpus, const Parameters<float>& params,
                         const Vocabulary& vocab, TokenizerMode mode, Serialization serialization,
                         uint64_t seed);

// Cosine scores in double precision; descending score, ties by ascending pool
// index; zero-norm query or row scores -1.
std::vector<ScoredHit> cosine_topk(const Vec<float>& query, const EmbeddingPool& pool, size_t k);

// ground_truth[i] is the target-pool row holding query i's true match. Ranks
// are computed against the full target pool.
RecallReport recall_at_k(const EmbeddingPool& queries, const EmbeddingPool& targets,
                         const std::vector<size_t>& ground_truth, size_t k,
                         const std::string& task_name);

struct TaskPools {
    EmbeddingPool source;
    EmbeddingPool target;
    std::vector<size_t> ground_truth;
};

// Selects the task's two variants out of a full corpus pool, pairing by
// (project, func_name) and dropping functions missing on either side.
TaskPools build_task_pools(const EmbeddingPool& corpus_pool, const TaskSpec& task);

// Every query's variants live in the target pool under the query's identity;
// per query, the fraction of those variants found in the top k, averaged.
double vuln_search(const EmbeddingPool& queries, const EmbeddingPool& targets, size_t k = 11);

// Binary pool container; bit-exact round-trip.
void save_pool(const std::string& path, const EmbeddingPool& pool);
EmbeddingPool load_pool(const std::string& path);

// Tab-separated text for external tools: project, func, variant, then the
// vector components.
void export_pool_tsv(const std::string& path, const EmbeddingPool& pool);

} // namespace uniasm
