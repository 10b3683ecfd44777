#include "frontend/function.hpp"

#include "common/errors.hpp"

namespace uniasm {

std::string to_string(Compiler c) {
    switch (c) {
    case Compiler::Gcc: return "gcc";
    case Compiler::Clang: return "clang";
    case Compiler::Ollvm: return "ollvm";
    }
    return "?";
}

std::string to_string(OptLevel o) {
    switch (o) {
    case OptLevel::O0: return "O0";
    case OptLevel::O1: return "O1";
    case OptLevel::O2: return "O2";
    case OptLevel::O3: return "O3";
    }
    return "?";
}

std::string to_string(Obfuscation o) {
    switch (o) {
    case Obfuscation::None: return "none";
    case Obfuscation::Sub: return "sub";
    case Obfuscation::Fla: return "fla";
    case Obfuscation::Bcf: return "bcf";
    }
    return "?";
}

std::string to_string(const VariantKey& key) {
    std::string s = to_string(key.compiler) + "-" + to_string(key.opt);
    if (key.obf != Obfuscation::None) {
        s += "-" + to_string(key.obf);
    }
    return s;
}

Compiler compiler_from_string(const std::string& s) {
    if (s == "gcc") return Compiler::Gcc;
    if (s == "clang") return Compiler::Clang;
    if (s == "ollvm") return Compiler::Ollvm;
    throw ValidationError("unknown compiler: '" + s + "'");
}

OptLevel opt_from_string(const std::string& s) {
    if (s == "O0") return OptLevel::O0;
    if (s == "O1") return OptLevel::O1;
    if (s == "O2") return OptLevel::O2;
    if (s == "O3") return OptLevel::O3;
    throw ValidationError("unknown optimization level: '" + s + "'");
}

Obfuscation obf_from_string(const std::string& s) {
    if (s == "none") return Obfuscation::None;
    if (s == "sub") return Obfuscation::Sub;
    if (s == "fla") return Obfuscation::Fla;
    if (s == "bcf") return Obfuscation::Bcf;
    throw ValidationError("unknown obfuscation: '" + s + "'");
}

VariantKey variant_from_string(const std::string& s) {
    size_t first = s.find('-');
    if (first == std::string::npos) {
        throw ValidationError("malformed variant key: '" + s + "'");
    }
    size_t second = s.find('-', first + 1);

    VariantKey key;
    key.compiler = compiler_from_string(s.substr(0, first));
    key.opt = opt_from_string(s.substr(first + 1, second == std::string::npos
                                                      ? std::string::npos
                                                      : second - first - 1));
    key.obf = second == std::string::npos ? Obfuscation::None : obf_from_string(s.substr(second + 1));
    if (key.obf != Obfuscation::None && key.compiler != Compiler::Ollvm) {
        throw ValidationError("obfuscation requires the ollvm compiler: '" + s + "'");
    }
    return key;
}

} // namespace uniasm
