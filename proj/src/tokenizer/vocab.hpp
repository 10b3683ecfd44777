#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tokenizer/tokenizer.hpp"

namespace uniasm {

// Reserved ids. Checkpoints depend on these staying fixed.
inline constexpr int32_t kPadId = 0;
inline constexpr int32_t kUnkId = 1;
inline constexpr int32_t kClsId = 2;
inline constexpr int32_t kSepId = 3;
inline constexpr int32_t kMaskId = 4;
inline constexpr size_t kSpecialCount = 5;

struct TokenizerConfig {
    TokenizerMode mode = TokenizerMode::Full;
    size_t vocab_cap = 21000; // must be >= 6: the five specials plus room for one token

    void validate() const;
};

class Vocabulary {
public:
    Vocabulary() = default;

    // Index = id. Specials occupy slots 0-4.
    const std::vector<std::string>& tokens() const { return tokens_; }
    size_t size() const { return tokens_.size(); }
    TokenizerMode mode() const { return mode_; }
    size_t cap() const { return cap_; }

    // Returns the id, or kUnkId when the token is unknown.
    int32_t id_of(const std::string& token) const;
    const std::string& token_of(int32_t id) const;

    std::vector<int32_t> encode(const std::vector<std::string>& tokens) const;
    std::vector<std::string> decode(const std::vector<int32_t>& ids) const;

    static Vocabulary build(const std::unordered_map<std::string, uint64_t>& frequencies,
                            const TokenizerConfig& config);

    // Plain text, one token per line, line order = id; a leading comment line
    // carries the mode and cap.
    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int32_t> index_;
    TokenizerMode mode_ = TokenizerMode::Full;
    size_t cap_ = 21000;

    void rebuild_index();
};

// Frequency accumulation helper; shards can be counted independently and
// merged before the single finalize pass.
void count_tokens(const std::vector<std::string>& tokens,
                  std::unordered_map<std::string, uint64_t>& frequencies);

extern const char* const kSpecialTokens[kSpecialCount];

} // namespace uniasm
