// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
// Turns a structured region tree into a statement tree by symbolically
// executing blocks and reconciling register state at joins. Both the
// source emitter and the structural evaluator consume the result.

#ifndef OCLDEC_LOWER_HPP
#define OCLDEC_LOWER_HPP

#include <string>
#include <vector>

#include "ocldec/cfg.hpp"
#include "ocldec/structurizer.hpp"
#include "ocldec/sym_state.hpp"

namespace ocldec {

enum class StmtKind : uint8_t {
    Basic, // one sym_state Statement (assign/store/decl/raw asm)
    If,    // structured conditional
    Label, // goto residue only
    Goto,  // goto residue only
};

struct Stmt {
    StmtKind kind = StmtKind::Basic;
    Statement base;            // Basic
    ExprPtr cond;              // If: condition; Goto: optional guard
    std::vector<Stmt> then_body, else_body; // If
    std::string label;         // Label/Goto target name
};

struct LoweredBody {
    std::vector<Stmt> stmts;
    int fallback_count = 0; // raw-asm statements in the tree
};

// Lowers a fully or partially reduced region forest. `residue` regions
// (when reduce() could not finish) are emitted as labeled chunks connected
// by gotos, with a warning. The register file starts from the ABI entry
// state.
LoweredBody lower_kernel(const Cfg &cfg, const ReduceResult &regions, const StepContext &ctx);

} // namespace ocldec

#endif
