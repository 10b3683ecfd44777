#include "frontend/serialize.hpp"

#include <algorithm>
#include <random>

#include "common/errors.hpp"

namespace uniasm {

namespace {

void require_cfg(const Function& f, const char* op) {
    if (!f.has_cfg()) {
        throw ValidationError(std::string(op) + " requires a CFG, but function '" + f.name +
                              "' has none");
    }
}

// Successor lists sorted ascending, deduplicated. Deterministic traversal
// order depends on this.
std::vector<std::vector<size_t>> adjacency(const Function& f) {
    std::vector<std::vector<size_t>> adj(f.blocks->size());
    if (f.edges) {
        for (const CfgEdge& e : *f.edges) {
            adj[e.from].push_back(e.to);
        }
    }
    for (auto& succ : adj) {
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    }
    return adj;
}

std::vector<std::string> instructions_of_path(const Function& f, const std::vector<size_t>& path) {
    std::vector<std::string> out;
    for (size_t b : path) {
        const BasicBlock& blk = (*f.blocks)[b];
        for (size_t i = blk.begin; i < blk.end; ++i) {
            out.push_back(f.instructions[i].text);
        }
    }
    return out;
}

// Iterative DFS from the entry that drops back edges (targets still on the
// DFS stack). Ascending successor order keeps the classification stable.
std::vector<std::vector<size_t>> remove_back_edges(const std::vector<std::vector<size_t>>& adj,
                                                   size_t entry) {
    enum class Color : uint8_t { White, Grey, Black };
    std::vector<Color> color(adj.size(), Color::White);
    std::vector<std::vector<size_t>> forward(adj.size());

    struct Frame {
        size_t node;
        size_t next = 0;
    };
    std::vector<Frame> stack;
    stack.push_back({entry});
    color[entry] = Color::Grey;
    while (!stack.empty()) {
        Frame& fr = stack.back();
        if (fr.next < adj[fr.node].size()) {
            const size_t succ = adj[fr.node][fr.next++];
            if (color[succ] == Color::Grey) {
                continue; // back edge, dropped
            }
            forward[fr.node].push_back(succ);
            if (color[succ] == Color::White) {
                color[succ] = Color::Grey;
                stack.push_back({succ});
            }
        } else {
            color[fr.node] = Color::Black;
            stack.pop_back();
        }
    }
    return forward;
}

} // namespace

std::string to_string(Serialization s) {
    switch (s) {
    case Serialization::Linear: return "linear";
    case Serialization::RandomWalk: return "random-walk";
    case Serialization::LongestWalk: return "longest-walk";
    }
    return "?";
}

Serialization serialization_from_string(const std::string& s) {
    if (s == "linear") return Serialization::Linear;
    if (s == "random-walk") return Serialization::RandomWalk;
    if (s == "longest-walk") return Serialization::LongestWalk;
    throw ValidationError("unknown serialization mode: '" + s + "'");
}

size_t entry_block(const Function& f) {
    require_cfg(f, "entry_block");
    size_t best = 0;
    size_t best_begin = SIZE_MAX;
    for (size_t i = 0; i < f.blocks->size(); ++i) {
        if ((*f.blocks)[i].begin < best_begin) {
            best_begin = (*f.blocks)[i].begin;
            best = i;
        }
    }
    return best;
}

std::vector<std::string> serialize_linear(const Function& f) {
    std::vector<std::string> out;
    out.reserve(f.instructions.size());
    for (const Instruction& instr : f.instructions) {
        out.push_back(instr.text);
    }
    return out;
}

std::vector<std::string> serialize_random_walk(const Function& f, uint64_t seed) {
    require_cfg(f, "random-walk serialization");
    const auto adj = adjacency(f);
    std::vector<bool> visited(adj.size(), false);
    std::mt19937_64 rng(seed);

    std::vector<size_t> path;
    size_t current = entry_block(f);
    visited[current] = true;
    path.push_back(current);
    for (;;) {
        std::vector<size_t> candidates;
        for (size_t succ : adj[current]) {
            if (!visited[succ]) candidates.push_back(succ);
        }
        if (candidates.empty()) break;
        current = candidates[rng() % candidates.size()];
        visited[current] = true;
        path.push_back(current);
    }
    return instructions_of_path(f, path);
}

std::vector<std::string> serialize_longest_walk(const Function& f) {
    require_cfg(f, "longest-walk serialization");
    const size_t entry = entry_block(f);
    const auto forward = remove_back_edges(adjacency(f), entry);

    // value[v]: max instruction count of a path starting at v on the
    // back-edge-free graph; choice[v]: successor realizing it, SIZE_MAX to
    // stop. Equal counts prefer stopping, then the smallest successor —
    // that makes the block-index sequence lexicographically smallest.
    const size_t n = forward.size();
    std::vector<size_t> value(n, SIZE_MAX);
    std::vector<size_t> choice(n, SIZE_MAX);

    // Memoized recursion, iterative to survive deep graphs.
    std::vector<size_t> work;
    work.push_back(entry);
    while (!work.empty()) {
        const size_t v = work.back();
        if (value[v] != SIZE_MAX) {
            work.pop_back();
            continue;
        }
        bool ready = true;
        for (size_t succ : forward[v]) {
            if (value[succ] == SIZE_MAX) {
                work.push_back(succ);
                ready = false;
            }
        }
        if (!ready) continue;
        work.pop_back();
        size_t best = 0;
        size_t best_succ = SIZE_MAX;
        for (size_t succ : forward[v]) {
            if (value[succ] > best) {
                best = value[succ];
                best_succ = succ;
            }
        }
        value[v] = (*f.blocks)[v].size() + best;
        choice[v] = best_succ;
    }

    std::vector<size_t> path;
    for (size_t v = entry; v != SIZE_MAX; v = choice[v]) {
        path.push_back(v);
    }
    return instructions_of_path(f, path);
}

std::vector<std::string> serialize(const Function& f, Serialization mode, uint64_t seed) {
    switch (mode) {
    case Serialization::Linear: return serialize_linear(f);
    case Serialization::RandomWalk: return serialize_random_walk(f, seed);
    case Serialization::LongestWalk: return serialize_longest_walk(f);
    }
    throw ValidationError("invalid serialization mode");
}

} // namespace uniasm
