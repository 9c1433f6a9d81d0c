// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#ifndef OCLDEC_CFG_HPP
#define OCLDEC_CFG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ocldec/asm_frontend.hpp"
#include "ocldec/diagnostics.hpp"
#include "ocldec/registers.hpp"

namespace ocldec {

enum class TermKind : uint8_t {
    Fallthrough,
    Unconditional, // s_branch
    Conditional,   // s_cbranch_*
    EndOfProgram,  // s_endpgm (or listing end)
};

enum class CondCode : uint8_t {
    Scc0,
    Scc1,
    Vccz,
    Vccnz,
    Execz,
    Execnz,
    Masked, // synthesized by exec-mask normalization; source = saved mask
};

struct Terminator {
    TermKind kind = TermKind::Fallthrough;
    CondCode cc = CondCode::Scc0;
    int taken = -1;     // Conditional/Unconditional target block
    int not_taken = -1; // Conditional fallthrough block
    Operand mask_source; // Masked: the s_and_saveexec source operand
    int line = 0;
};

// Exec-mask bookkeeping instructions found in a block, in order.
enum class ExecOpKind : uint8_t {
    Save,    // s_and_saveexec_b64 dst, src
    Invert,  // s_andn2_b64/s_xor_b64 exec, saved, exec (operand order varies)
    Restore, // s_mov_b64 exec, saved | s_or_b64 exec, exec, saved
};

struct ExecOp {
    ExecOpKind kind = ExecOpKind::Save;
    size_t index = 0;      // instruction index within the block
    unsigned mask_sgpr = 0; // first SGPR of the saved mask pair
    Operand source;         // Save: the condition source operand
};

struct BasicBlock {
    int id = 0;
    std::vector<std::string> labels;
    std::vector<Instruction> instructions;
    std::vector<bool> suppressed; // mask bookkeeping hidden from lowering
    Terminator term;
    std::vector<int> preds, succs;
    std::vector<ExecOp> exec_ops;
    bool reachable = true;
    bool mask_absorbed = false; // consumed by exec-mask normalization
};

class Cfg {
public:
    std::vector<BasicBlock> blocks;
    int entry = 0;

    BasicBlock &block(int id) { return blocks.at(size_t(id)); }
    const BasicBlock &block(int id) const { return blocks.at(size_t(id)); }

    // Recomputes preds from succs after edge rewiring.
    void rebuild_preds();

    // Reachability from the entry block; unreachable blocks keep their
    // contents but are excluded from structuring.
    void mark_reachable();
};

// Builds the flow graph for one kernel body. Splits at labels, branches
// and s_endpgm; resolves branch targets (an undefined label is a hard
// error naming it); flags unreachable blocks with a note.
Cfg build_cfg(const std::vector<Instruction> &instructions, DiagnosticSink &sink);

// Finds exec-mask save/invert/restore instructions in each block. Runs
// before the structurizer's mask normalization.
void annotate_exec(Cfg &cfg);

// Per-block live-in register sets (dense reg-id indexing), from a backward
// may-use fixpoint over instruction operands. Conservative: unparsed
// instructions use everything they name.
std::vector<std::vector<bool>> live_in_sets(const Cfg &cfg);

// Graphviz rendering of the flow graph, one node per block.
std::string to_dot(const Cfg &cfg, const std::string &name);

} // namespace ocldec

#endif
