#pragma once

#include "taintweave/tir.hpp"

namespace taintweave {

// Parses TIR source text. Throws ParseError (with line/column) on syntax
// errors, duplicate class/method/field declarations, and unknown opcodes.
Program parse_program(const std::string& text);

} // namespace taintweave
