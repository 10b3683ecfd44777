#include "frontend/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace uniasm {

namespace {

const std::unordered_set<std::string>& jcc_mnemonics() {
    // All jcc aliases. jmp stays as-is; loop variants are branches but not
    // conditional jumps in the jcc sense.
    static const std::unordered_set<std::string> set = {
        "ja", "jae", "jb", "jbe", "jc", "jcxz", "je", "jecxz", "jg", "jge",
        "jl", "jle", "jna", "jnae", "jnb", "jnbe", "jnc", "jne", "jng",
        "jnge", "jnl", "jnle", "jno", "jnp", "jns", "jnz", "jo", "jp", "jpe",
        "jpo", "jrcxz", "js", "jz",
    };
    return set;
}

const std::unordered_set<std::string>& branch_mnemonics() {
    static const std::unordered_set<std::string>& jcc = jcc_mnemonics();
    static const std::unordered_set<std::string> set = [] {
        std::unordered_set<std::string> s = jcc;
        s.insert("jmp");
        s.insert("call");
        s.insert("loop");
        s.insert("loope");
        s.insert("loopne");
        return s;
    }();
    return set;
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// "0x1f", "1234", "-8", "+0x40" — a bare numeric literal.
bool is_numeric_literal(const std::string& s) {
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    if (i >= s.size()) return false;
    if (s.compare(i, 2, "0x") == 0 || s.compare(i, 2, "0X") == 0) {
        i += 2;
        if (i >= s.size()) return false;
        for (; i < s.size(); ++i) {
            if (!std::isxdigit(static_cast<unsigned char>(s[i]))) return false;
        }
        return true;
    }
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

bool is_vector_register(const std::string& s) {
    if (s.size() < 4) return false;
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    if (c != 'x' && c != 'y' && c != 'z') return false;
    if (std::tolower(static_cast<unsigned char>(s[1])) != 'm' ||
        std::tolower(static_cast<unsigned char>(s[2])) != 'm') {
        return false;
    }
    for (size_t i = 3; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Checks whether the bracket expression mentions `reg` as a whole word.
bool bracket_mentions(const std::string& expr, const std::string& reg) {
    size_t i = 0;
    while (i < expr.size()) {
        if (!is_word_char(expr[i])) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < expr.size() && is_word_char(expr[j])) ++j;
        if (to_lower(expr.substr(i, j - i)) == reg) return true;
        i = j;
    }
    return false;
}

std::string classify_bracket(const std::string& expr) {
    if (bracket_mentions(expr, "rip") || bracket_mentions(expr, "eip")) return "PTR";
    if (bracket_mentions(expr, "rsp") || bracket_mentions(expr, "esp")) return "SSP";
    if (bracket_mentions(expr, "rbp") || bracket_mentions(expr, "ebp")) return "SBP";
    return "MEM";
}

// Replaces every standalone numeric token in the operand with NUM. Register
// names that merely contain digits (r8, st0) are single word tokens and
// survive untouched.
std::string replace_numbers(const std::string& operand) {
    std::string out;
    out.reserve(operand.size());
    size_t i = 0;
    while (i < operand.size()) {
        if (!is_word_char(operand[i])) {
            // Signs adjacent to digits stay operators here; whole-operand
            // literals were already collapsed before this pass runs.
            out += operand[i];
            ++i;
            continue;
        }
        size_t j = i;
        while (j < operand.size() && is_word_char(operand[j])) ++j;
        const std::string word = operand.substr(i, j - i);
        out += is_numeric_literal(word) ? "NUM" : word;
        i = j;
    }
    return out;
}

std::string collapse_spaces(const std::string& s) {
    std::string out;
    bool in_space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t') {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out += ' ';
        in_space = false;
        out += c;
    }
    return out;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace

bool is_conditional_jump(const std::string& mnemonic) {
    return jcc_mnemonics().count(to_lower(mnemonic)) > 0;
}

std::string normalize_instruction(const std::string& text) {
    const std::string trimmed = trim(text);
    if (trimmed.empty()) return trimmed;

    const size_t mnem_end = trimmed.find_first_of(" \t");
    std::string mnemonic = trimmed.substr(0, mnem_end);
    const std::string lower_mnem = to_lower(mnemonic);

    std::vector<std::string> operands;
    if (mnem_end != std::string::npos) {
        const std::string rest = trimmed.substr(mnem_end + 1);
        size_t start = 0;
        while (start <= rest.size()) {
            size_t comma = rest.find(',', start);
            std::string op = comma == std::string::npos
                                 ? rest.substr(start)
                                 : rest.substr(start, comma - start);
            op = collapse_spaces(trim(op));
            if (!op.empty()) operands.push_back(op);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }

    const bool is_branch = branch_mnemonics().count(lower_mnem) > 0;

    for (std::string& op : operands) {
        const size_t lb = op.find('[');
        if (lb != std::string::npos) {
            const size_t rb = op.find(']', lb);
            const std::string expr =
                rb == std::string::npos ? op.substr(lb + 1) : op.substr(lb + 1, rb - lb - 1);
            // The whole operand collapses to the class token, size
            // prefixes included.
            op = classify_bracket(expr);
            continue;
        }
        if (is_branch && is_numeric_literal(op)) {
            op = "REL";
            continue;
        }
        if (is_vector_register(to_lower(op))) {
            op = "XMM";
            continue;
        }
        // A whole-operand literal is one immediate, sign included.
        if (is_numeric_literal(op)) {
            op = "NUM";
            continue;
        }
        op = replace_numbers(op);
    }

    if (is_conditional_jump(lower_mnem)) {
        mnemonic = "cjmp";
    }

    std::string out = mnemonic;
    for (size_t i = 0; i < operands.size(); ++i) {
        out += i == 0 ? " " : ", ";
        out += operands[i];
    }
    return out;
}

Function normalize_function(Function f) {
    for (Instruction& instr : f.instructions) {
        instr.text = normalize_instruction(instr.text);
    }
    return f;
}

} // namespace uniasm
