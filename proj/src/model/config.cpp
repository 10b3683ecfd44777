#include "model/config.hpp"

#include <string>

#include "common/errors.hpp"

namespace uniasm {

void ModelConfig::validate() const {
    if (layers < 1) throw ValidationError("model layers must be >= 1");
    if (heads < 1) throw ValidationError("model heads must be >= 1");
    if (hidden < 1 || hidden % heads != 0) {
        throw ValidationError("hidden size " + std::to_string(hidden) +
                              " is not divisible by head count " + std::to_string(heads));
    }
    if (intermediate < 1) throw ValidationError("intermediate size must be >= 1");
    if (max_sl < 8) throw ValidationError("MaxSL must be >= 8");
    if (vocab < 6) throw ValidationError("vocab size must be >= 6");
}

} // namespace uniasm
