#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace uniasm {

// Token granularity. Full: one token per instruction. Half: opcode token +
// joined-operand token. Piece: one token per word, brackets and arithmetic
// stripped.
enum class TokenizerMode : uint8_t { Full = 0, Half = 1, Piece = 2 };

std::string to_string(TokenizerMode m);
TokenizerMode tokenizer_mode_from_string(const std::string& s);

// Tokenizes one normalized instruction. Whitespace and comma separators
// become single underscores in the joined forms:
//   Full:  "mov rax, NUM"        -> {"mov_rax_NUM"}
//   Half:  "mov rax, [rbx+NUM]"  -> {"mov", "rax_[rbx+NUM]"}
//   Piece: "mov rax, [rbx+NUM]"  -> {"mov", "rax", "rbx", "NUM"}
std::vector<std::string> tokenize_instruction(const std::string& instruction, TokenizerMode mode);

std::vector<std::string> tokenize(const std::vector<std::string>& instructions,
                                  TokenizerMode mode);

} // namespace uniasm
