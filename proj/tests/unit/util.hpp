#pragma once

#include "taintweave/parser.hpp"
#include "taintweave/pipeline.hpp"

#include <string>

inline taintweave::Program load_corpus(const std::string& name) {
    return taintweave::parse_program(
        taintweave::read_file(std::string(TAINTWEAVE_CORPUS_DIR) + "/" + name + ".tir"));
}
