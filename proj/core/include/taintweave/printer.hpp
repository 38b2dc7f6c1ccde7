#pragma once

#include "taintweave/tir.hpp"

namespace taintweave {

// Canonical, deterministic text rendering. parse_program(emit_program(p))
// is structurally equal to p.
std::string emit_program(const Program& p);

std::string emit_instruction(const Instruction& ins);

} // namespace taintweave
