#include "tokenizer/tokenizer.hpp"

#include <cctype>

#include "common/errors.hpp"

namespace uniasm {

std::string to_string(TokenizerMode m) {
    switch (m) {
        case TokenizerMode::Full: return "full-i";
        case TokenizerMode::Half: return "half-i";
        case TokenizerMode::Piece: return "piece-i";
    }
    throw RuntimeFault("tokenizer mode out of range");
}

TokenizerMode tokenizer_mode_from_string(const std::string& s) {
    if (s == "full-i") return TokenizerMode::Full;
    if (s == "half-i") return TokenizerMode::Half;
    if (s == "piece-i") return TokenizerMode::Piece;
    throw ValidationError("unknown tokenizer mode: " + s);
}

namespace {

bool is_separator(char c) {
    return c == ',' || std::isspace(static_cast<unsigned char>(c));
}

// Runs of whitespace and commas collapse to a single underscore; leading and
// trailing separators drop.
std::string join_with_underscores(const std::string& text, size_t begin, size_t end) {
    std::string out;
    bool pending = false;
    for (size_t i = begin; i < end; ++i) {
        if (is_separator(text[i])) {
            pending = !out.empty();
            continue;
        }
        if (pending) {
            out += '_';
            pending = false;
        }
        out += text[i];
    }
    return out;
}

bool is_word_char(char c) {
    return c == '_' || std::isalnum(static_cast<unsigned char>(c));
}

} // namespace

std::vector<std::string> tokenize_instruction(const std::string& instruction, TokenizerMode mode) {
    std::vector<std::string> out;
    switch (mode) {
        case TokenizerMode::Full: {
            std::string token = join_with_underscores(instruction, 0, instruction.size());
            if (!token.empty()) out.push_back(std::move(token));
            break;
        }
        case TokenizerMode::Half: {
            size_t i = 0;
            while (i < instruction.size() && is_separator(instruction[i])) ++i;
            size_t mnem_end = i;
            while (mnem_end < instruction.size() &&
                   !std::isspace(static_cast<unsigned char>(instruction[mnem_end]))) {
                ++mnem_end;
            }
            if (mnem_end > i) out.push_back(instruction.substr(i, mnem_end - i));
            std::string operands = join_with_underscores(instruction, mnem_end, instruction.size());
            if (!operands.empty()) out.push_back(std::move(operands));
            break;
        }
        case TokenizerMode::Piece: {
            std::string word;
            for (char c : instruction) {
                if (is_word_char(c)) {
                    word += c;
                    continue;
                }
                if (!word.empty()) out.push_back(std::move(word));
                word.clear();
            }
            if (!word.empty()) out.push_back(std::move(word));
            break;
        }
    }
    return out;
}

std::vector<std::string> tokenize(const std::vector<std::string>& instructions,
                                  TokenizerMode mode) {
    std::vector<std::string> out;
    out.reserve(instructions.size());
    for (const auto& instr : instructions) {
        auto tokens = tokenize_instruction(instr, mode);
        for (auto& t : tokens) out.push_back(std::move(t));
    }
    return out;
}

} // namespace uniasm
