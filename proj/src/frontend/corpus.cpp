#include "frontend/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "common/errors.hpp"

namespace uniasm {

namespace {

using nlohmann::json;

uint64_t parse_address(const json& value, const std::string& where) {
    if (value.is_number_unsigned()) {
        return value.get<uint64_t>();
    }
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        try {
            size_t pos = 0;
            const uint64_t addr = std::stoull(s, &pos, 16);
            if (pos == s.size() || (s.compare(0, 2, "0x") == 0 && pos == s.size())) {
                return addr;
            }
        } catch (const std::exception&) {
        }
    }
    throw ValidationError(where + ": field 'addr' must be a hex string or unsigned integer");
}

} // namespace

Function parse_function_record(const std::string& json_line, const std::string& where) {
    json rec;
    try {
        rec = json::parse(json_line);
    } catch (const json::parse_error& e) {
        throw ValidationError(where + ": malformed JSON record: " + e.what());
    }
    if (!rec.is_object()) {
        throw ValidationError(where + ": record is not a JSON object");
    }

    auto require_string = [&](const char* field) -> std::string {
        if (!rec.contains(field) || !rec[field].is_string()) {
            throw ValidationError(where + ": missing or non-string field '" + field + "'");
        }
        return rec[field].get<std::string>();
    };

    Function f;
    f.project = require_string("project");
    f.binary = require_string("binary");
    f.name = require_string("func_name");
    f.key.compiler = compiler_from_string(require_string("compiler"));
    f.key.opt = opt_from_string(require_string("opt"));
    f.key.obf = obf_from_string(require_string("obf"));
    if (f.key.obf != Obfuscation::None && f.key.compiler != Compiler::Ollvm) {
        throw ValidationError(where + ": obfuscation '" + to_string(f.key.obf) +
                              "' is only valid for compiler 'ollvm'");
    }

    if (!rec.contains("instructions") || !rec["instructions"].is_array()) {
        throw ValidationError(where + ": missing or non-array field 'instructions'");
    }
    uint64_t prev_addr = 0;
    bool first = true;
    for (const auto& item : rec["instructions"]) {
        if (!item.is_object() || !item.contains("addr") || !item.contains("text") ||
            !item["text"].is_string()) {
            throw ValidationError(where + ": instruction entries need 'addr' and string 'text'");
        }
        Instruction instr;
        instr.address = parse_address(item["addr"], where);
        instr.text = item["text"].get<std::string>();
        if (instr.text.empty()) {
            throw ValidationError(where + ": empty instruction text");
        }
        if (!first && instr.address <= prev_addr) {
            throw ValidationError(where + ": instruction addresses must be strictly increasing");
        }
        prev_addr = instr.address;
        first = false;
        f.instructions.push_back(std::move(instr));
    }

    const bool has_blocks = rec.contains("blocks");
    const bool has_edges = rec.contains("edges");
    if (has_edges && !has_blocks) {
        throw ValidationError(where + ": 'edges' given without 'blocks'");
    }
    if (has_blocks) {
        if (!rec["blocks"].is_array()) {
            throw ValidationError(where + ": field 'blocks' must be an array");
        }
        std::vector<BasicBlock> blocks;
        for (const auto& item : rec["blocks"]) {
            if (!item.is_array() || item.size() != 2 || !item[0].is_number_unsigned() ||
                !item[1].is_number_unsigned()) {
                throw ValidationError(where + ": block entries must be [start, end) index pairs");
            }
            blocks.push_back({item[0].get<size_t>(), item[1].get<size_t>()});
        }
        // Blocks must partition [0, n) without overlap; order in the record
        // is free.
        std::vector<BasicBlock> sorted = blocks;
        std::sort(sorted.begin(), sorted.end(),
                  [](const BasicBlock& a, const BasicBlock& b) { return a.begin < b.begin; });
        size_t cursor = 0;
        for (const BasicBlock& b : sorted) {
            if (b.begin >= b.end || b.begin != cursor) {
                throw ValidationError(where + ": blocks must be non-empty and partition the "
                                              "instruction range without overlap or gaps");
            }
            cursor = b.end;
        }
        if (cursor != f.instructions.size()) {
            throw ValidationError(where + ": blocks do not cover all instructions");
        }
        f.blocks = std::move(blocks);

        std::vector<CfgEdge> edges;
        if (has_edges) {
            if (!rec["edges"].is_array()) {
                throw ValidationError(where + ": field 'edges' must be an array");
            }
            for (const auto& item : rec["edges"]) {
                if (!item.is_array() || item.size() != 2 || !item[0].is_number_unsigned() ||
                    !item[1].is_number_unsigned()) {
                    throw ValidationError(where + ": edge entries must be [from, to] pairs");
                }
                CfgEdge e{item[0].get<size_t>(), item[1].get<size_t>()};
                if (e.from >= f.blocks->size() || e.to >= f.blocks->size()) {
                    throw ValidationError(where + ": edge endpoint out of block range");
                }
                edges.push_back(e);
            }
        }
        f.edges = std::move(edges);
    }
    return f;
}

std::vector<Function> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw RuntimeFault("cannot open corpus file: " + path);
    }
    std::vector<Function> corpus;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        corpus.push_back(parse_function_record(line, path + ":" + std::to_string(line_no)));
    }
    return corpus;
}

CorpusStats corpus_stats(const std::vector<Function>& corpus) {
    CorpusStats stats;
    std::map<std::string, size_t> per_variant;
    for (const Function& f : corpus) {
        ++stats.functions;
        stats.instructions += f.instructions.size();
        if (f.has_cfg()) ++stats.with_cfg;
        const size_t n = f.instructions.size();
        size_t bucket = 0;
        if (n <= 128) bucket = 0;
        else if (n <= 256) bucket = 1;
        else if (n <= 512) bucket = 2;
        else if (n <= 1024) bucket = 3;
        else bucket = 4;
        ++stats.length_buckets[bucket];
        ++per_variant[to_string(f.key)];
    }
    stats.functions_per_variant.assign(per_variant.begin(), per_variant.end());
    return stats;
}

} // namespace uniasm
