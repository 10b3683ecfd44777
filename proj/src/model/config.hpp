#pragma once

#include <cstdint>

namespace uniasm {

struct ModelConfig {
    uint32_t layers = 4;
    uint32_t heads = 12;
    uint32_t hidden = 768;
    uint32_t intermediate = 3072;
    uint32_t max_sl = 256;
    uint32_t vocab = 21000;

    uint32_t head_dim() const { return hidden / heads; }
    void validate() const;

    bool operator==(const ModelConfig&) const = default;
};

} // namespace uniasm
