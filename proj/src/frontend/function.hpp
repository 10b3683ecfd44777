#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace uniasm {

enum class Compiler : uint8_t { Gcc = 0, Clang = 1, Ollvm = 2 };
enum class OptLevel : uint8_t { O0 = 0, O1 = 1, O2 = 2, O3 = 3 };
enum class Obfuscation : uint8_t { None = 0, Sub = 1, Fla = 2, Bcf = 3 };

// Identifies one compilation of a function. Obfuscations only exist for
// ollvm builds.
struct VariantKey {
    Compiler compiler = Compiler::Gcc;
    OptLevel opt = OptLevel::O0;
    Obfuscation obf = Obfuscation::None;

    bool operator==(const VariantKey&) const = default;
    auto operator<=>(const VariantKey&) const = default;
};

std::string to_string(Compiler c);
std::string to_string(OptLevel o);
std::string to_string(Obfuscation o);
std::string to_string(const VariantKey& key);

Compiler compiler_from_string(const std::string& s);
OptLevel opt_from_string(const std::string& s);
Obfuscation obf_from_string(const std::string& s);

// Parses "gcc-O0", "clang-O3", "ollvm-O2-fla".
VariantKey variant_from_string(const std::string& s);

struct Instruction {
    uint64_t address = 0;
    std::string text;
};

// Half-open range of instruction indices forming one basic block.
struct BasicBlock {
    size_t begin = 0;
    size_t end = 0;

    size_t size() const { return end - begin; }
};

struct CfgEdge {
    size_t from = 0;
    size_t to = 0;
};

// One disassembled function as it appears in the corpus. `blocks`/`edges`
// are present only when the record carried a CFG.
struct Function {
    VariantKey key;
    std::string project;
    std::string binary;
    std::string name;
    std::vector<Instruction> instructions;
    std::optional<std::vector<BasicBlock>> blocks;
    std::optional<std::vector<CfgEdge>> edges;

    bool has_cfg() const { return blocks.has_value(); }
};

} // namespace uniasm
