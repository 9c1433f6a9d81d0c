// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
// Symbolic execution over the register file: each instruction updates
// register slots with expression trees; memory writes and unsupported
// instructions come out as statements.

#ifndef OCLDEC_SYM_STATE_HPP
#define OCLDEC_SYM_STATE_HPP

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ocldec/abi_model.hpp"
#include "ocldec/asm_frontend.hpp"
#include "ocldec/diagnostics.hpp"
#include "ocldec/expr.hpp"
#include "ocldec/registers.hpp"

namespace ocldec {

struct FoldOptions {
    bool fold_local_size = false;
};

enum class StatementKind : uint8_t { Assign, Store, Decl, RawAsm };

struct Statement {
    StatementKind kind = StatementKind::Assign;
    std::string name;     // Assign/Decl target variable
    DataType decl_type;   // Decl
    ExprPtr addr;         // Store: byte address (64-bit expression)
    ExprPtr value;        // Assign/Store value, Decl initializer (may be null)
    DataType elem_type;   // Store element type
    AddressSpace space = AddressSpace::Global; // Store target space
    std::string text;     // RawAsm payload (trimmed source line)
    int line = 0;
};

// Everything step() needs besides the register file.
struct StepContext {
    const KernelConfig *config = nullptr;
    const AbiMap *abi = nullptr;
    DiagnosticSink *sink = nullptr;
    FoldOptions folds;
    // When set, every fresh variable materialized for an unbound register
    // read is recorded here so the emitter can declare it.
    std::vector<std::pair<std::string, DataType>> *fresh_vars = nullptr;
    // Kernel-wide registry of issued variable names. Fresh reads may reuse
    // a name (same register, same version: same value); join variables must
    // not, since sibling branch scopes can reach equal version counts with
    // different values.
    std::set<std::string> *name_pool = nullptr;
};

struct StepResult {
    RegisterFile regs;
    std::vector<Statement> stmts;
};

// Executes one instruction against a register state. Pure: the input state
// is untouched; the result carries the successor state and any statements
// the instruction produced. Branches, waits and nops produce neither.
// Unsupported instructions produce a RawAsm statement and invalidate their
// destination register.
StepResult step(const RegisterFile &regs, const Instruction &ins, const StepContext &ctx);

// Reads a register pair as one 64-bit value, materializing fresh variables
// for unbound halves. Exposed for the load/store address handling and for
// tests; step() uses it internally.
ExprPtr read_pair(RegisterFile &regs, const Operand &op, const StepContext &ctx);

// Reads one 32-bit register or operand value.
ExprPtr read_operand(RegisterFile &regs, const Operand &op, const StepContext &ctx);

// Copy of the register file; splits take one before each branch arm.
inline RegisterFile snapshot(const RegisterFile &regs) { return regs; }

// One register's reconciliation produced by merge_at_join.
struct JoinFixup {
    std::string var_name;
    DataType var_type;
    ExprPtr then_value;  // assigned at the end of the then arm (null: none)
    ExprPtr else_value;  // assigned at the end of the else arm (null: none)
    ExprPtr init_value;  // initializer when the decl can carry one
};

struct JoinResult {
    RegisterFile regs;
    std::vector<JoinFixup> fixups;
};

// Merges two register states at a control-flow join. Registers holding
// equal expressions pass through; disagreeing registers that are live at
// the join become fresh "<reg>_<version>" variables (declared in the
// enclosing scope, assigned at each arm's end); disagreeing dead registers
// are left unbound at the higher version. Order-insensitive up to variable
// initializer placement: `then`/`els` swap yields the same merged bindings.
JoinResult merge_at_join(const RegisterFile &then_state, const RegisterFile &else_state,
                         const std::vector<bool> &live_at_join, const StepContext &ctx);

std::string reg_display_name(unsigned reg_id);

} // namespace ocldec

#endif
