#include "tokenizer/vocab.hpp"

#include <algorithm>
#include <sstream>

#include "common/errors.hpp"
#include "common/io.hpp"

namespace uniasm {

const char* const kSpecialTokens[kSpecialCount] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};

void TokenizerConfig::validate() const {
    if (vocab_cap < 6) {
        throw ValidationError("vocab_cap must be at least 6, got " + std::to_string(vocab_cap));
    }
}

int32_t Vocabulary::id_of(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token_of(int32_t id) const {
    if (id < 0 || static_cast<size_t>(id) >= tokens_.size()) {
        throw ValidationError("token id out of range: " + std::to_string(id));
    }
    return tokens_[static_cast<size_t>(id)];
}

std::vector<int32_t> Vocabulary::encode(const std::vector<std::string>& tokens) const {
    std::vector<int32_t> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id_of(t));
    return ids;
}

std::vector<std::string> Vocabulary::decode(const std::vector<int32_t>& ids) const {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int32_t id : ids) out.push_back(token_of(id));
    return out;
}

void Vocabulary::rebuild_index() {
    index_.clear();
    index_.reserve(tokens_.size());
    for (size_t i = 0; i < tokens_.size(); ++i) {
        auto [it, inserted] = index_.emplace(tokens_[i], static_cast<int32_t>(i));
        if (!inserted) throw ValidationError("duplicate vocabulary token: " + tokens_[i]);
    }
}

Vocabulary Vocabulary::build(const std::unordered_map<std::string, uint64_t>& frequencies,
                             const TokenizerConfig& config) {
    config.validate();

    Vocabulary v;
    v.mode_ = config.mode;
    v.cap_ = config.vocab_cap;
    v.tokens_.assign(kSpecialTokens, kSpecialTokens + kSpecialCount);

    std::vector<std::pair<std::string, uint64_t>> ranked;
    ranked.reserve(frequencies.size());
    for (const auto& [token, count] : frequencies) {
        if (token.empty()) continue;
        bool is_special = false;
        for (const char* s : kSpecialTokens) is_special |= token == s;
        if (!is_special) ranked.emplace_back(token, count);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    for (const auto& [token, count] : ranked) {
        (void)count;
        if (v.tokens_.size() >= config.vocab_cap) break;
        v.tokens_.push_back(token);
    }
    v.rebuild_index();
    return v;
}

void Vocabulary::save(const std::string& path) const {
    std::ostringstream out;
    out << "# uniasm-vocab mode=" << to_string(mode_) << " cap=" << cap_ << "\n";
    for (const auto& t : tokens_) out << t << "\n";
    write_file_atomic(path, out.str());
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::string content = read_file(path);
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# uniasm-vocab ", 0) != 0) {
        throw ValidationError("vocabulary file missing header: " + path);
    }

    Vocabulary v;
    std::istringstream header(line.substr(2));
    std::string field;
    header >> field; // literal "uniasm-vocab"
    while (header >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw ValidationError("malformed vocabulary header: " + path);
        std::string key = field.substr(0, eq);
        std::string value = field.substr(eq + 1);
        if (key == "mode") {
            v.mode_ = tokenizer_mode_from_string(value);
        } else if (key == "cap") {
            v.cap_ = static_cast<size_t>(std::stoull(value));
        } else {
            throw ValidationError("unknown vocabulary header field: " + key);
        }
    }

    while (std::getline(in, line)) v.tokens_.push_back(line);
    if (!v.tokens_.empty() && v.tokens_.back().empty()) v.tokens_.pop_back();

    if (v.tokens_.size() < kSpecialCount) {
        throw ValidationError("vocabulary file too small: " + path);
    }
    for (size_t i = 0; i < kSpecialCount; ++i) {
        if (v.tokens_[i] != kSpecialTokens[i]) {
            throw ValidationError("vocabulary special token mismatch at id " + std::to_string(i));
        }
    }
    if (v.tokens_.size() > v.cap_) {
        throw ValidationError("vocabulary exceeds its declared cap: " + path);
    }
    v.rebuild_index();
    return v;
}

void count_tokens(const std::vector<std::string>& tokens,
                  std::unordered_map<std::string, uint64_t>& frequencies) {
    for (const auto& t : tokens) ++frequencies[t];
}

} // namespace uniasm
