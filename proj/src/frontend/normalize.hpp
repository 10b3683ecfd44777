#pragma once

#include <string>

#include "frontend/function.hpp"

namespace uniasm {

// Rewrites one disassembled instruction into its normalized form:
//   [rip+...]/[eip+...]        -> PTR
//   [rsp+...]/[esp+...]        -> SSP
//   [rbp+...]/[ebp+...]        -> SBP
//   any other [...] operand    -> MEM
//   direct branch/call target  -> REL
//   remaining immediates       -> NUM
//   xmm/ymm/zmm register       -> XMM
//   conditional-jump mnemonic  -> cjmp
// Output is canonical: single space after the mnemonic, operands joined by
// ", ". Normalization is idempotent; unknown mnemonics pass through.
std::string normalize_instruction(const std::string& text);

// Normalizes every instruction in place. Instruction count and all CFG
// fields are untouched.
Function normalize_function(Function f);

bool is_conditional_jump(const std::string& mnemonic);

} // namespace uniasm
