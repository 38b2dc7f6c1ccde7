#pragma once

#include "taintweave/tir.hpp"

namespace taintweave {

// Name mangling and shadow-companion suffixes used by the instrumenter and
// understood natively by the VM's stdlib intrinsics.
inline constexpr const char* kMangleSuffix = "$$INVIVO_PC";
inline constexpr const char* kTaintFieldSuffix = "$$taint";
inline constexpr const char* kTaintArrFieldSuffix = "$$taintArr";

inline constexpr const char* kTaintedInt = "runtime.TaintedInt";
inline constexpr const char* kTaintedBool = "runtime.TaintedBool";
inline constexpr const char* kTaintedIntArray = "runtime.TaintedIntArray";

bool is_stdlib_class(const std::string& name);   // "stdlib." prefix
bool is_runtime_class(const std::string& name);  // "runtime." prefix
bool is_builtin_class(const std::string& name);
bool is_builtin_owner(const MethodSig& sig);

// Declarations for the implicit stdlib/runtime classes: box types with their
// fields, intrinsic method signatures, and the overridable callback class
// stdlib.Fn. Bodies are empty; the VM implements them natively.
const std::vector<ClassDef>& builtin_classes();
const ClassDef* builtin_class(const std::string& name);

// Canonical intrinsic signatures.
const MethodSig& sig_in_read();       // <stdlib.In: int read()>
const MethodSig& sig_in_readbuf();    // <stdlib.In: void readBuf(int[])>
const MethodSig& sig_out_write();     // <stdlib.Out: void write(int)>
const MethodSig& sig_out_print();     // <stdlib.Out: void print(int)>
const MethodSig& sig_sys_exec();      // <stdlib.Sys: void exec(int)>
const MethodSig& sig_hof_map();       // <stdlib.Hof: int map(stdlib.Fn,int)>
const MethodSig& sig_fn_apply();      // <stdlib.Fn: int apply(int)>
const MethodSig& sig_arr_zeroslike(); // <runtime.Arr: int[] zeroslike(int[])>
const MethodSig& sig_arr_lift2();     // <runtime.Arr: runtime.TaintedIntArray[] lift2(int[][])>
const MethodSig& sig_arr_unlift2();   // <runtime.Arr: int[][] unlift2(runtime.TaintedIntArray[])>

bool is_sink_intrinsic(const MethodSig& sig); // write / exec

// All builtin methods are static-style except the overridable callback
// stdlib.Fn.apply.
bool is_static_builtin(const MethodSig& sig);

// Callback-accepting intrinsics, modeled as callers of the callback
// signature: (intrinsic, callback it invokes on its argument).
const std::vector<std::pair<MethodSig, MethodSig>>& callback_intrinsics();

} // namespace taintweave
