// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#ifndef OCLDEC_CODEGEN_HPP
#define OCLDEC_CODEGEN_HPP

#include <string>

#include "ocldec/asm_frontend.hpp"
#include "ocldec/expr.hpp"
#include "ocldec/lower.hpp"

namespace ocldec {

struct CodegenOptions {
    // reserved for future formatting knobs; output is deterministic
};

// Renders an expression as OpenCL C with minimal parentheses: a child is
// parenthesized only when its operator binds looser than its context.
std::string render_expr(const ExprPtr &e);

// One unsupported instruction as an inline-assembly statement. The payload
// between the quotes is the trimmed source line, byte for byte.
std::string emit_fallback(const Instruction &ins);
std::string emit_fallback(const std::string &source_text);

// Full kernel: signature from the declared (non-implicit) arguments, body
// from the lowered statement tree. 4-space indent, braces on the same
// line. Address expressions are rewritten to array indexing when the base
// is a recovered pointer argument and the scaling matches its element
// size.
std::string emit_kernel(const KernelConfig &config, const LoweredBody &body,
                        const CodegenOptions &opts = {});

} // namespace ocldec

#endif
