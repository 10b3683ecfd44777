#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "frontend/function.hpp"

namespace testutil {

// Plain straight-line function; addresses ascend in steps of 4 from 0x1000.
inline uniasm::Function make_function(const std::string& project, const std::string& name,
                                      const std::string& variant,
                                      const std::vector<std::string>& texts) {
    uniasm::Function f;
    f.project = project;
    f.binary = project + "-bin";
    f.name = name;
    f.key = uniasm::variant_from_string(variant);
    uint64_t addr = 0x1000;
    for (const auto& t : texts) {
        f.instructions.push_back({addr, t});
        addr += 4;
    }
    return f;
}

// CFG function whose instruction texts encode their block index, so a
// serialized stream can be decoded back into the block path it walked.
// block_sizes[i] instructions land in block i; text = "b<i>x<j>".
inline uniasm::Function make_cfg_function(const std::vector<size_t>& block_sizes,
                                          const std::vector<std::pair<size_t, size_t>>& edges,
                                          const std::string& variant = "gcc-O0") {
    std::vector<std::string> texts;
    std::vector<uniasm::BasicBlock> blocks;
    size_t at = 0;
    for (size_t bi = 0; bi < block_sizes.size(); ++bi) {
        blocks.push_back({at, at + block_sizes[bi]});
        for (size_t j = 0; j < block_sizes[bi]; ++j) {
            texts.push_back("b" + std::to_string(bi) + "x" + std::to_string(j));
        }
        at += block_sizes[bi];
    }
    uniasm::Function f = make_function("cfgproj", "walker", variant, texts);
    f.blocks = blocks;
    std::vector<uniasm::CfgEdge> es;
    for (auto [from, to] : edges) es.push_back({from, to});
    f.edges = es;
    return f;
}

// Recovers the block-index path from a stream of block-coded texts. Each
// block contributes a contiguous run "b<i>x0".."b<i>x<size-1>".
inline std::vector<size_t> decode_block_path(const std::vector<std::string>& stream,
                                             const std::vector<size_t>& block_sizes) {
    std::vector<size_t> path;
    size_t pos = 0;
    while (pos < stream.size()) {
        const std::string& head = stream[pos];
        size_t x = head.find('x');
        if (head.empty() || head[0] != 'b' || x == std::string::npos) {
            throw std::runtime_error("unexpected text in walk stream: " + head);
        }
        size_t bi = std::stoul(head.substr(1, x - 1));
        if (bi >= block_sizes.size()) throw std::runtime_error("bad block index");
        for (size_t j = 0; j < block_sizes[bi]; ++j) {
            std::string want = "b" + std::to_string(bi) + "x" + std::to_string(j);
            if (pos >= stream.size() || stream[pos] != want) {
                throw std::runtime_error("walk stream splits block " + std::to_string(bi));
            }
            ++pos;
        }
        path.push_back(bi);
    }
    return path;
}

inline nlohmann::json function_to_json(const uniasm::Function& f) {
    nlohmann::json rec;
    rec["project"] = f.project;
    rec["binary"] = f.binary;
    rec["func_name"] = f.name;
    rec["compiler"] = uniasm::to_string(f.key.compiler);
    rec["opt"] = uniasm::to_string(f.key.opt);
    rec["obf"] = uniasm::to_string(f.key.obf);
    nlohmann::json instrs = nlohmann::json::array();
    for (const auto& ins : f.instructions) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(ins.address));
        instrs.push_back({{"addr", std::string(buf)}, {"text", ins.text}});
    }
    rec["instructions"] = instrs;
    if (f.blocks) {
        nlohmann::json blocks = nlohmann::json::array();
        for (const auto& b : *f.blocks) blocks.push_back({b.begin, b.end});
        rec["blocks"] = blocks;
    }
    if (f.edges) {
        nlohmann::json edges = nlohmann::json::array();
        for (const auto& e : *f.edges) edges.push_back({e.from, e.to});
        rec["edges"] = edges;
    }
    return rec;
}

inline void write_corpus_jsonl(const std::string& path,
                               const std::vector<uniasm::Function>& corpus) {
    std::ofstream out(path, std::ios::trunc);
    for (const auto& f : corpus) out << function_to_json(f).dump() << "\n";
}

// Unique scratch directory under the system temp root; removed on scope exit.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        for (int attempt = 0; attempt < 64; ++attempt) {
            std::ostringstream name;
            name << "uniasm-test-" << std::hex << rng();
            std::filesystem::path candidate = base / name.str();
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str(const std::string& leaf = "") const {
        return leaf.empty() ? path_.string() : (path_ / leaf).string();
    }

private:
    std::filesystem::path path_;
};

// Instruction texts that survive normalization unchanged (register-register
// forms), drawn deterministically. Distinct functions get distinct streams;
// `salt` perturbs a few instructions to model a second compilation.
inline std::vector<std::string> synth_texts(uint64_t seed, size_t count, uint64_t salt = 0) {
    static const char* mnemonics[] = {"mov",  "add", "sub",  "xor", "and", "or",
                                      "test", "cmp", "lea",  "inc", "dec", "neg",
                                      "not",  "shl", "shr",  "imul"};
    static const char* registers[] = {"rax", "rbx", "rcx", "rdx", "rsi", "rdi", "r8",
                                      "r9",  "r10", "r11", "r12", "r13", "r14", "r15"};
    std::mt19937_64 rng(seed);
    std::vector<std::string> texts;
    for (size_t i = 0; i < count; ++i) {
        const char* m = mnemonics[rng() % 16];
        const char* a = registers[rng() % 14];
        const char* b = registers[rng() % 14];
        texts.push_back(std::string(m) + " " + a + ", " + b);
    }
    if (salt != 0) {
        std::mt19937_64 alt(seed ^ salt);
        size_t edits = 1 + alt() % 2;
        for (size_t e = 0; e < edits && !texts.empty(); ++e) {
            size_t at = alt() % texts.size();
            const char* m = mnemonics[alt() % 16];
            const char* a = registers[alt() % 14];
            const char* b = registers[alt() % 14];
            texts[at] = std::string(m) + " " + a + ", " + b;
        }
    }
    return texts;
}

// Synthetic cross-compiler corpus: `funcs` functions, each present in every
// requested variant. Variants share a token stream up to a small per-variant
// perturbation so a trained model can align them.
inline std::vector<uniasm::Function> synth_corpus(size_t funcs,
                                                  const std::vector<std::string>& variants,
                                                  uint64_t seed, size_t min_len = 12,
                                                  size_t len_spread = 9) {
    std::vector<uniasm::Function> corpus;
    std::mt19937_64 rng(seed);
    for (size_t i = 0; i < funcs; ++i) {
        uint64_t fn_seed = rng();
        size_t count = min_len + fn_seed % len_spread;
        for (size_t v = 0; v < variants.size(); ++v) {
            uint64_t salt = v == 0 ? 0 : 0x9e3779b97f4a7c15ull * v;
            corpus.push_back(make_function("synth", "fn" + std::to_string(i), variants[v],
                                           synth_texts(fn_seed, count, salt)));
        }
    }
    return corpus;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace testutil
