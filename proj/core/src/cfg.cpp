// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/cfg.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace ocldec {

void Cfg::rebuild_preds() {
    for (BasicBlock &b : blocks)
        b.preds.clear();
    for (BasicBlock &b : blocks)
        for (int s : b.succs)
            block(s).preds.push_back(b.id);
}

void Cfg::mark_reachable() {
    for (BasicBlock &b : blocks)
        b.reachable = false;
    if (blocks.empty())
        return;
    std::vector<int> stack{entry};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        BasicBlock &b = block(id);
        if (b.reachable)
            continue;
        b.reachable = true;
        for (int s : b.succs)
            stack.push_back(s);
    }
}

namespace {

bool is_branch(const Instruction &ins) {
    return ins.parts.prefix == "s" &&
           (ins.parts.root == "branch" || ins.parts.root.rfind("cbranch_", 0) == 0);
}

bool is_endpgm(const Instruction &ins) {
    return ins.parts.prefix == "s" && ins.parts.root == "endpgm";
}

std::optional<CondCode> branch_cond(const std::string &root) {
    if (root == "cbranch_scc0") return CondCode::Scc0;
    if (root == "cbranch_scc1") return CondCode::Scc1;
    if (root == "cbranch_vccz") return CondCode::Vccz;
    if (root == "cbranch_vccnz") return CondCode::Vccnz;
    if (root == "cbranch_execz") return CondCode::Execz;
    if (root == "cbranch_execnz") return CondCode::Execnz;
    return std::nullopt;
}

} // namespace

Cfg build_cfg(const std::vector<Instruction> &instructions, DiagnosticSink &sink) {
    Cfg cfg;
    if (instructions.empty()) {
        BasicBlock b;
        b.id = 0;
        b.term.kind = TermKind::EndOfProgram;
        cfg.blocks.push_back(std::move(b));
        return cfg;
    }

    // A block starts at the first instruction, at every label and after
    // every control transfer.
    std::vector<bool> leader(instructions.size(), false);
    leader[0] = true;
    for (size_t i = 0; i < instructions.size(); ++i) {
        if (!instructions[i].labels.empty())
            leader[i] = true;
        if ((is_branch(instructions[i]) || is_endpgm(instructions[i])) &&
            i + 1 < instructions.size())
            leader[i + 1] = true;
    }

    std::map<std::string, int> label_block;
    std::vector<int> block_of(instructions.size(), 0);
    for (size_t i = 0; i < instructions.size(); ++i) {
        if (leader[i]) {
            BasicBlock b;
            b.id = int(cfg.blocks.size());
            b.labels = instructions[i].labels;
            for (const std::string &l : b.labels)
                label_block[l] = b.id;
            cfg.blocks.push_back(std::move(b));
        }
        block_of[i] = int(cfg.blocks.size()) - 1;
        BasicBlock &b = cfg.blocks.back();
        b.instructions.push_back(instructions[i]);
        b.suppressed.push_back(false);
    }

    auto resolve = [&](const Instruction &ins) -> int {
        if (ins.operands.empty() || ins.operands[0].kind != OperandKind::Symbol)
            throw ParseError(ins.line, "branch without a label operand");
        auto it = label_block.find(ins.operands[0].text);
        if (it == label_block.end())
            throw ParseError(ins.line, "branch to undefined label '" + ins.operands[0].text + "'");
        return it->second;
    };

    for (size_t bi = 0; bi < cfg.blocks.size(); ++bi) {
        BasicBlock &b = cfg.blocks[bi];
        const Instruction &last = b.instructions.back();
        const int next = bi + 1 < cfg.blocks.size() ? int(bi) + 1 : -1;
        Terminator &t = b.term;
        t.line = last.line;

        if (is_endpgm(last)) {
            t.kind = TermKind::EndOfProgram;
        } else if (last.parts.prefix == "s" && last.parts.root == "branch") {
            t.kind = TermKind::Unconditional;
            t.taken = resolve(last);
        } else if (last.parts.prefix == "s" && last.parts.root.rfind("cbranch_", 0) == 0) {
            auto cc = branch_cond(last.parts.root);
            if (!cc)
                throw ParseError(last.line,
                                 "unsupported conditional branch s_" + last.parts.root);
            if (next < 0)
                throw ParseError(last.line, "conditional branch at end of kernel");
            t.kind = TermKind::Conditional;
            t.cc = *cc;
            t.taken = resolve(last);
            t.not_taken = next;
        } else if (next >= 0) {
            t.kind = TermKind::Fallthrough;
            t.taken = next;
        } else {
            // Listing ended without s_endpgm; treat it as the exit.
            t.kind = TermKind::EndOfProgram;
        }

        if (t.kind == TermKind::Conditional) {
            b.succs = {t.taken, t.not_taken};
        } else if (t.taken >= 0) {
            b.succs = {t.taken};
        }
    }

    cfg.rebuild_preds();
    cfg.mark_reachable();
    for (const BasicBlock &b : cfg.blocks)
        if (!b.reachable)
            sink.note(b.instructions.front().line, "unreachable code");
    return cfg;
}

void annotate_exec(Cfg &cfg) {
    for (BasicBlock &b : cfg.blocks) {
        b.exec_ops.clear();
        for (size_t i = 0; i < b.instructions.size(); ++i) {
            const Instruction &ins = b.instructions[i];
            if (i < b.suppressed.size() && b.suppressed[i])
                continue; // already consumed by a mask rewrite
            if (ins.parse_failed || ins.parts.prefix != "s")
                continue;
            const std::string &root = ins.parts.root;
            const auto &ops = ins.operands;

            if (root == "and_saveexec" && ops.size() >= 2 && ops[0].is_sreg() &&
                ops[0].count == 2) {
                ExecOp op;
                op.kind = ExecOpKind::Save;
                op.index = i;
                op.mask_sgpr = ops[0].first;
                op.source = ops[1];
                b.exec_ops.push_back(op);
                continue;
            }

            const bool dst_exec = !ops.empty() && ops[0].is_special(SpecialReg::Exec);
            if (!dst_exec)
                continue;

            if (root == "mov" && ops.size() >= 2 && ops[1].is_sreg() && ops[1].count == 2) {
                ExecOp op;
                op.kind = ExecOpKind::Restore;
                op.index = i;
                op.mask_sgpr = ops[1].first;
                b.exec_ops.push_back(op);
                continue;
            }
            if (root == "or" && ops.size() >= 3) {
                const Operand *saved = nullptr;
                if (ops[1].is_special(SpecialReg::Exec) && ops[2].is_sreg() && ops[2].count == 2)
                    saved = &ops[2];
                else if (ops[2].is_special(SpecialReg::Exec) && ops[1].is_sreg() &&
                         ops[1].count == 2)
                    saved = &ops[1];
                if (saved) {
                    ExecOp op;
                    op.kind = ExecOpKind::Restore;
                    op.index = i;
                    op.mask_sgpr = saved->first;
                    b.exec_ops.push_back(op);
                    continue;
                }
            }
            if ((root == "andn2" || root == "xor") && ops.size() >= 3) {
                const Operand *saved = nullptr;
                if (ops[1].is_sreg() && ops[1].count == 2 && ops[2].is_special(SpecialReg::Exec))
                    saved = &ops[1];
                else if (ops[2].is_sreg() && ops[2].count == 2 &&
                         ops[1].is_special(SpecialReg::Exec))
                    saved = &ops[2];
                if (saved) {
                    ExecOp op;
                    op.kind = ExecOpKind::Invert;
                    op.index = i;
                    op.mask_sgpr = saved->first;
                    b.exec_ops.push_back(op);
                }
            }
        }
    }
}

namespace {

void add_operand_regs(const Operand &op, std::vector<bool> &set) {
    auto mark = [&](unsigned id) {
        if (id < kNumRegIds)
            set[id] = true;
    };
    switch (op.kind) {
    case OperandKind::SReg:
        for (unsigned i = 0; i < op.count; ++i)
            mark(op.first + i);
        break;
    case OperandKind::VReg:
        for (unsigned i = 0; i < op.count; ++i)
            mark(kRegIdVgpr0 + op.first + i);
        break;
    case OperandKind::Special:
        switch (op.special) {
        case SpecialReg::Exec:
            mark(kRegIdExecLo);
            mark(kRegIdExecHi);
            break;
        case SpecialReg::ExecLo: mark(kRegIdExecLo); break;
        case SpecialReg::ExecHi: mark(kRegIdExecHi); break;
        case SpecialReg::Vcc:
            mark(kRegIdVccLo);
            mark(kRegIdVccHi);
            break;
        case SpecialReg::VccLo: mark(kRegIdVccLo); break;
        case SpecialReg::VccHi: mark(kRegIdVccHi); break;
        case SpecialReg::Scc: mark(kRegIdScc); break;
        case SpecialReg::M0: mark(kRegIdM0); break;
        }
        break;
    default:
        break;
    }
}

// Register uses and defs of one instruction. The destination heuristic:
// operand 0 is written by ALU and load instructions; stores, branches and
// compares deviate and are special-cased. Unparsed instructions count as
// using everything they name and defining nothing, which only errs toward
// keeping registers live.
void instruction_use_def(const Instruction &ins, std::vector<bool> &use, std::vector<bool> &def) {
    const auto &ops = ins.operands;
    const std::string &root = ins.parts.root;
    const std::string &prefix = ins.parts.prefix;

    if (ins.parse_failed) {
        for (const Operand &op : ops)
            add_operand_regs(op, use);
        return;
    }

    if (prefix == "s" &&
        (root == "waitcnt" || root == "nop" || root == "endpgm" || root == "barrier"))
        return;

    if (prefix == "s" && root == "branch")
        return;
    if (prefix == "s" && root.rfind("cbranch_", 0) == 0) {
        if (root == "cbranch_scc0" || root == "cbranch_scc1") {
            use[kRegIdScc] = true;
        } else if (root == "cbranch_vccz" || root == "cbranch_vccnz") {
            use[kRegIdVccLo] = true;
            use[kRegIdVccHi] = true;
        } else {
            use[kRegIdExecLo] = true;
            use[kRegIdExecHi] = true;
        }
        return;
    }

    if (prefix == "flat" && root.rfind("store", 0) == 0) {
        for (const Operand &op : ops)
            add_operand_regs(op, use);
        return;
    }

    if (prefix == "s" && root.rfind("cmp_", 0) == 0) {
        for (const Operand &op : ops)
            add_operand_regs(op, use);
        def[kRegIdScc] = true;
        return;
    }

    if (prefix == "s" && root == "and_saveexec" && !ops.empty()) {
        add_operand_regs(ops[0], def);
        for (size_t i = 1; i < ops.size(); ++i)
            add_operand_regs(ops[i], use);
        use[kRegIdExecLo] = true;
        use[kRegIdExecHi] = true;
        def[kRegIdExecLo] = true;
        def[kRegIdExecHi] = true;
        return;
    }

    // v_add/v_sub carry-out and v_cmp destinations write their first two
    // or first operands; everything after is a source. addk/mulk read
    // their destination too.
    size_t ndefs = 1;
    if (prefix == "v" && (root == "add" || root == "sub" || root == "subrev" || root == "addc") &&
        ops.size() >= 2 &&
        (ops[1].is_special(SpecialReg::Vcc) || (ops[1].is_sreg() && ops[1].count == 2)))
        ndefs = 2;

    const bool reads_dst =
        (prefix == "s" && (root == "addk" || root == "mulk")) || (prefix == "v" && root == "mac");

    for (size_t i = 0; i < ops.size(); ++i) {
        if (i < ndefs) {
            add_operand_regs(ops[i], def);
            if (reads_dst && i == 0)
                add_operand_regs(ops[i], use);
        } else {
            add_operand_regs(ops[i], use);
        }
    }
    if (prefix == "s" && ops.size() >= 1 &&
        (root == "add" || root == "sub" || root == "addk" || root == "mulk" || root == "and" ||
         root == "or" || root == "xor" || root == "andn2" || root == "lshl" || root == "lshr" ||
         root == "ashr"))
        def[kRegIdScc] = true;
}

} // namespace

std::vector<std::vector<bool>> live_in_sets(const Cfg &cfg) {
    const size_t n = cfg.blocks.size();
    std::vector<std::vector<bool>> use(n, std::vector<bool>(kNumRegIds, false));
    std::vector<std::vector<bool>> def(n, std::vector<bool>(kNumRegIds, false));
    std::vector<std::vector<bool>> live_in(n, std::vector<bool>(kNumRegIds, false));

    for (size_t bi = 0; bi < n; ++bi) {
        const BasicBlock &b = cfg.blocks[bi];
        std::vector<bool> ins_use(kNumRegIds, false), ins_def(kNumRegIds, false);
        for (size_t i = 0; i < b.instructions.size(); ++i) {
            if (i < b.suppressed.size() && b.suppressed[i])
                continue;
            std::fill(ins_use.begin(), ins_use.end(), false);
            std::fill(ins_def.begin(), ins_def.end(), false);
            instruction_use_def(b.instructions[i], ins_use, ins_def);
            for (unsigned r = 0; r < kNumRegIds; ++r) {
                if (ins_use[r] && !def[bi][r])
                    use[bi][r] = true;
                if (ins_def[r])
                    def[bi][r] = true;
            }
        }
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t bi = n; bi-- > 0;) {
            const BasicBlock &b = cfg.blocks[bi];
            for (unsigned r = 0; r < kNumRegIds; ++r) {
                bool out = false;
                for (int s : b.succs)
                    out = out || live_in[size_t(s)][r];
                bool in = use[bi][r] || (out && !def[bi][r]);
                if (in != live_in[bi][r]) {
                    live_in[bi][r] = in;
                    changed = true;
                }
            }
        }
    }
    return live_in;
}

std::string to_dot(const Cfg &cfg, const std::string &name) {
    std::ostringstream os;
    os << "digraph \"" << name << "\" {\n";
    os << "  node [shape=box, fontname=\"monospace\"];\n";
    for (const BasicBlock &b : cfg.blocks) {
        os << "  b" << b.id << " [label=\"B" << b.id;
        for (const std::string &l : b.labels)
            os << ' ' << l;
        os << "\\n" << b.instructions.size() << " ins";
        if (!b.reachable)
            os << " (dead)";
        os << "\"];\n";
    }
    for (const BasicBlock &b : cfg.blocks) {
        if (b.term.kind == TermKind::Conditional) {
            os << "  b" << b.id << " -> b" << b.term.taken << " [label=\"T\"];\n";
            os << "  b" << b.id << " -> b" << b.term.not_taken << " [label=\"F\"];\n";
        } else {
            for (int s : b.succs)
                os << "  b" << b.id << " -> b" << s << ";\n";
        }
    }
    os << "}\n";
    return os.str();
}

} // namespace ocldec
