#include "dataset/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "common/errors.hpp"
#include "common/io.hpp"
#include "frontend/normalize.hpp"

namespace uniasm {

namespace {

constexpr OptLevel kOpts[4] = {OptLevel::O0, OptLevel::O1, OptLevel::O2, OptLevel::O3};
constexpr Obfuscation kObfs[3] = {Obfuscation::Sub, Obfuscation::Fla, Obfuscation::Bcf};

} // namespace

std::vector<std::pair<VariantKey, VariantKey>> enumerate_pairs(
    const std::vector<VariantKey>& available) {
    std::set<VariantKey> have(available.begin(), available.end());
    auto has = [&](Compiler c, OptLevel o, Obfuscation b) {
        return have.count(VariantKey{c, o, b}) != 0;
    };

    std::vector<std::pair<VariantKey, VariantKey>> out;
    for (Compiler c : {Compiler::Gcc, Compiler::Clang}) {
        for (size_t i = 0; i < 4; ++i) {
            for (size_t j = i + 1; j < 4; ++j) {
                if (has(c, kOpts[i], Obfuscation::None) && has(c, kOpts[j], Obfuscation::None)) {
                    out.emplace_back(VariantKey{c, kOpts[i], Obfuscation::None},
                                     VariantKey{c, kOpts[j], Obfuscation::None});
                }
            }
        }
    }
    for (OptLevel og : kOpts) {
        for (OptLevel oc : kOpts) {
            if (has(Compiler::Gcc, og, Obfuscation::None) &&
                has(Compiler::Clang, oc, Obfuscation::None)) {
                out.emplace_back(VariantKey{Compiler::Gcc, og, Obfuscation::None},
                                 VariantKey{Compiler::Clang, oc, Obfuscation::None});
            }
        }
    }
    for (Obfuscation b : kObfs) {
        for (OptLevel o : kOpts) {
            if (has(Compiler::Ollvm, o, Obfuscation::None) && has(Compiler::Ollvm, o, b)) {
                out.emplace_back(VariantKey{Compiler::Ollvm, o, Obfuscation::None},
                                 VariantKey{Compiler::Ollvm, o, b});
            }
        }
    }
    return out;
}

bool filter_small(const Function& f, size_t min_instructions) {
    return f.instructions.size() >= min_instructions;
}

std::vector<PairSample> augment_swap(const std::vector<PairSample>& pairs) {
    std::vector<PairSample> out;
    out.reserve(pairs.size() * 2);
    for (const auto& p : pairs) {
        out.push_back(p);
        PairSample swapped;
        swapped.first = p.second;
        swapped.second = p.first;
        swapped.project = p.project;
        swapped.func_name = p.func_name;
        swapped.first_key = p.second_key;
        swapped.second_key = p.first_key;
        out.push_back(std::move(swapped));
    }
    return out;
}

namespace {

// Shared budget for the two functions of a packed pair: cap = MaxSL-3 slots,
// split evenly with the odd slot on the first side, surplus from an
// under-budget side flowing to the other.
std::pair<size_t, size_t> truncation_keep(size_t len_first, size_t len_second, size_t cap) {
    if (len_first + len_second <= cap) return {len_first, len_second};
    size_t budget_first = (cap + 1) / 2;
    size_t budget_second = cap / 2;
    if (len_first <= budget_first) return {len_first, cap - len_first};
    if (len_second <= budget_second) return {cap - len_second, len_second};
    return {budget_first, budget_second};
}

} // namespace

PackedSequence pack_pair(const std::vector<std::string>& first,
                         const std::vector<std::string>& second, const Vocabulary& vocab,
                         size_t max_sl) {
    if (max_sl < 8) throw ValidationError("MaxSL must be at least 8 for pair packing");
    if (first.empty() || second.empty()) {
        throw ValidationError("pair packing requires two non-empty token sequences");
    }
    auto [keep_first, keep_second] = truncation_keep(first.size(), second.size(), max_sl - 3);

    PackedSequence p;
    p.len_first = static_cast<uint32_t>(keep_first);
    p.len_second = static_cast<uint32_t>(keep_second);
    p.ids.reserve(keep_first + keep_second + 3);
    p.ids.push_back(kClsId);
    for (size_t i = 0; i < keep_first; ++i) p.ids.push_back(vocab.id_of(first[i]));
    p.ids.push_back(kSepId);
    for (size_t i = 0; i < keep_second; ++i) p.ids.push_back(vocab.id_of(second[i]));
    p.ids.push_back(kSepId);

    p.segments.assign(p.ids.size(), 1);
    for (size_t i = 0; i < keep_first + 2; ++i) p.segments[i] = 0;
    return p;
}

PackedSequence pack_single(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                           size_t max_sl) {
    if (max_sl < 3) throw ValidationError("MaxSL must be at least 3 for single packing");
    if (tokens.empty()) throw ValidationError("single packing requires a non-empty sequence");
    size_t keep = std::min(tokens.size(), max_sl - 2);

    PackedSequence p;
    p.len_first = static_cast<uint32_t>(keep);
    p.len_second = 0;
    p.ids.reserve(keep + 2);
    p.ids.push_back(kClsId);
    for (size_t i = 0; i < keep; ++i) p.ids.push_back(vocab.id_of(tokens[i]));
    p.ids.push_back(kSepId);
    p.segments.assign(p.ids.size(), 0);
    return p;
}

std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> split_shuffle(
    const std::vector<DatasetRecord>& samples, double ratio, uint64_t seed) {
    if (samples.size() % 2 != 0) {
        throw ValidationError("swap-augmented sample count must be even");
    }
    if (ratio < 0.0 || ratio > 1.0) throw ValidationError("split ratio must lie in [0, 1]");

    size_t units = samples.size() / 2;
    std::vector<size_t> order(units);
    for (size_t i = 0; i < units; ++i) order[i] = i;

    std::mt19937_64 rng(seed);
    for (size_t i = units; i > 1; --i) {
        size_t j = static_cast<size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }

    size_t train_units = static_cast<size_t>(std::llround(ratio * static_cast<double>(units)));
    std::vector<DatasetRecord> train;
    std::vector<DatasetRecord> validation;
    train.reserve(train_units * 2);
    validation.reserve((units - train_units) * 2);
    for (size_t i = 0; i < units; ++i) {
        auto& dst = i < train_units ? train : validation;
        dst.push_back(samples[order[i] * 2]);
        dst.push_back(samples[order[i] * 2 + 1]);
    }
    return {std::move(train), std::move(validation)};
}

std::vector<std::string> function_tokens(const Function& f, TokenizerMode mode,
                                         Serialization serialization, uint64_t seed) {
    Function normalized = normalize_function(f);
    std::string identity = f.project + "\x1f" + f.name + "\x1f" + to_string(f.key);
    uint64_t walk_seed = seed ^ fnv1a64(identity.data(), identity.size());
    std::vector<std::string> instrs = serialize(normalized, serialization, walk_seed);
    return tokenize(instrs, mode);
}

std::vector<DatasetRecord> build_dataset(const std::vector<Function>& corpus,
                                         const Vocabulary& vocab,
                                         const DatasetBuildConfig& config) {
    if (vocab.mode() != config.tokenizer_mode) {
        throw ValidationError("tokenizer mode " + to_string(config.tokenizer_mode) +
                              " does not match vocabulary mode " + to_string(vocab.mode()));
    }
    std::map<std::pair<std::string, std::string>, std::vector<const Function*>> groups;
    for (const auto& f : corpus) {
        if (!filter_small(f, config.min_instructions)) continue;
        groups[{f.project, f.name}].push_back(&f);
    }

    std::vector<DatasetRecord> records;
    for (const auto& [identity, variants] : groups) {
        std::map<VariantKey, const Function*> by_key;
        std::vector<VariantKey> keys;
        for (const Function* f : variants) {
            if (!by_key.emplace(f->key, f).second) {
                throw ValidationError("duplicate variant " + to_string(f->key) + " for function " +
                                      identity.first + "/" + identity.second);
            }
            keys.push_back(f->key);
        }

        std::vector<PairSample> pairs;
        for (const auto& [ka, kb] : enumerate_pairs(keys)) {
            PairSample s;
            s.first = function_tokens(*by_key.at(ka), config.tokenizer_mode, config.serialization,
                                      config.seed);
            s.second = function_tokens(*by_key.at(kb), config.tokenizer_mode, config.serialization,
                                       config.seed);
            s.project = identity.first;
            s.func_name = identity.second;
            s.first_key = ka;
            s.second_key = kb;
            pairs.push_back(std::move(s));
        }

        for (const auto& s : augment_swap(pairs)) {
            DatasetRecord r;
            r.packed = pack_pair(s.first, s.second, vocab, config.max_sl);
            r.project = s.project;
            r.func_name = s.func_name;
            r.first_key = s.first_key;
            r.second_key = s.second_key;
            records.push_back(std::move(r));
        }
    }
    return records;
}

void save_dataset(const std::string& path, const DatasetHeader& header,
                  const std::vector<DatasetRecord>& records) {
    std::ostringstream out;
    nlohmann::json h;
    h["vocab_hash"] = header.vocab_hash;
    h["max_sl"] = header.max_sl;
    h["tokenizer"] = to_string(header.tokenizer);
    h["serialization"] = to_string(header.serialization);
    out << h.dump() << "\n";

    for (const auto& r : records) {
        nlohmann::json j;
        j["project"] = r.project;
        j["func"] = r.func_name;
        j["first_variant"] = to_string(r.first_key);
        j["second_variant"] = to_string(r.second_key);
        j["ids"] = r.packed.ids;
        j["segments"] = r.packed.segments;
        j["len_first"] = r.packed.len_first;
        j["len_second"] = r.packed.len_second;
        out << j.dump() << "\n";
    }
    write_file_atomic(path, out.str());
}

std::pair<DatasetHeader, std::vector<DatasetRecord>> load_dataset(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("dataset file is empty: " + path);

    DatasetHeader header;
    try {
        nlohmann::json h = nlohmann::json::parse(line);
        header.vocab_hash = h.at("vocab_hash").get<std::string>();
        header.max_sl = h.at("max_sl").get<size_t>();
        header.tokenizer = tokenizer_mode_from_string(h.at("tokenizer").get<std::string>());
        header.serialization = serialization_from_string(h.at("serialization").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad dataset header: ") + e.what());
    }

    std::vector<DatasetRecord> records;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            DatasetRecord r;
            r.project = j.at("project").get<std::string>();
            r.func_name = j.at("func").get<std::string>();
            r.first_key = variant_from_string(j.at("first_variant").get<std::string>());
            r.second_key = variant_from_string(j.at("second_variant").get<std::string>());
            r.packed.ids = j.at("ids").get<std::vector<int32_t>>();
            r.packed.segments = j.at("segments").get<std::vector<int8_t>>();
            r.packed.len_first = j.at("len_first").get<uint32_t>();
            r.packed.len_second = j.at("len_second").get<uint32_t>();
            if (r.packed.ids.size() != r.packed.segments.size()) {
                throw ValidationError("ids/segments length mismatch");
            }
            if (r.packed.ids.size() > header.max_sl) {
                throw ValidationError("record longer than MaxSL");
            }
            records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return {header, std::move(records)};
}

} // namespace uniasm
