#pragma once

#include "taintweave/types.hpp"

namespace taintweave {

// How a method signature changes under instrumentation. Mangling triggers
// when the method has at least one primitive or primitive-1-dim-array
// parameter, or a primitive return. Shadow parameters (int per primitive,
// int[] per primitive array) are appended after the originals in original
// parameter order; a primitive return is replaced by the matching box type.
struct SignatureTransform {
    MethodSig original;
    std::optional<MethodSig> mangled; // absent = signature unchanged
    std::vector<std::optional<int>> shadow_param_map; // original index -> shadow index
    bool boxed_return = false;

    bool changed() const { return mangled.has_value(); }
};

SignatureTransform transform_signature(const MethodSig& s);

// Arrays of dimension > 1 with primitive elements become arrays of
// runtime.TaintedIntArray of dimension dims-1; everything else unchanged.
TypeDesc lift_multidim(const TypeDesc& t);

} // namespace taintweave
