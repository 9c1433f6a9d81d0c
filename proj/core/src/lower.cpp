// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/lower.hpp"

#include <sstream>

#include "ocldec/builtin_detector.hpp"

namespace ocldec {

namespace {

struct Lowerer {
    const Cfg &cfg;
    const StepContext &ctx;
    std::vector<std::vector<bool>> live_in;
    int fallbacks = 0;

    Lowerer(const Cfg &c, const StepContext &sc) : cfg(c), ctx(sc), live_in(live_in_sets(c)) {}

    ExprPtr fold(const ExprPtr &e) const {
        return ctx.config ? fold_expr(e, *ctx.config, ctx.folds) : e;
    }

    void lower_block(int block_id, RegisterFile &regs, std::vector<Stmt> &out) {
        const BasicBlock &b = cfg.block(block_id);
        for (size_t i = 0; i < b.instructions.size(); ++i) {
            if (b.suppressed[i])
                continue;
            StepResult sr = step(regs, b.instructions[i], ctx);
            regs = std::move(sr.regs);
            for (Statement &st : sr.stmts) {
                if (st.kind == StatementKind::Store) {
                    st.addr = fold(st.addr);
                    st.value = fold(st.value);
                } else if (st.kind == StatementKind::RawAsm) {
                    ++fallbacks;
                }
                Stmt s;
                s.kind = StmtKind::Basic;
                s.base = std::move(st);
                out.push_back(std::move(s));
            }
        }
    }

    // Condition under which the terminator's taken edge runs, evaluated
    // against the header's exit state.
    ExprPtr taken_cond(CondCode cc, const Operand &mask_source, RegisterFile &regs) {
        switch (cc) {
        case CondCode::Scc0:
        case CondCode::Scc1: {
            RegisterSlot &scc = regs.slot(kRegIdScc);
            ExprPtr e = scc.expr;
            if (!e) {
                Operand op;
                op.kind = OperandKind::Special;
                op.special = SpecialReg::Scc;
                e = read_operand(regs, op, ctx);
            }
            return cc == CondCode::Scc1 ? e : negate_condition(e);
        }
        case CondCode::Vccz:
        case CondCode::Vccnz: {
            Operand op;
            op.kind = OperandKind::Special;
            op.special = SpecialReg::Vcc;
            op.count = 2;
            ExprPtr e = read_operand(regs, op, ctx);
            return cc == CondCode::Vccnz ? e : negate_condition(e);
        }
        case CondCode::Masked: {
            // The taken edge bypasses the then arm: it runs when the saved
            // condition is false.
            ExprPtr src = mask_source.count >= 2 || mask_source.kind == OperandKind::Special
                              ? read_pair(regs, mask_source, ctx)
                              : read_operand(regs, mask_source, ctx);
            return negate_condition(src);
        }
        default:
            return nullptr; // exec-mask branches are never structured
        }
    }

    void emit_join(const JoinResult &join, bool has_else, std::vector<Stmt> &out,
                   std::vector<Stmt> &then_body, std::vector<Stmt> &else_body) {
        for (const JoinFixup &fx : join.fixups) {
            Stmt decl;
            decl.kind = StmtKind::Basic;
            decl.base.kind = StatementKind::Decl;
            decl.base.name = fx.var_name;
            decl.base.decl_type = fx.var_type;
            if (!has_else && fx.else_value) {
                // One-armed if: seed the variable with the fall-through
                // value so the join sees it either way.
                decl.base.value = fold(fx.else_value);
            }
            out.push_back(std::move(decl));

            if (fx.then_value) {
                Stmt assign;
                assign.kind = StmtKind::Basic;
                assign.base.kind = StatementKind::Assign;
                assign.base.name = fx.var_name;
                assign.base.value = fold(fx.then_value);
                then_body.push_back(std::move(assign));
            }
            if (has_else && fx.else_value) {
                Stmt assign;
                assign.kind = StmtKind::Basic;
                assign.base.kind = StatementKind::Assign;
                assign.base.name = fx.var_name;
                assign.base.value = fold(fx.else_value);
                else_body.push_back(std::move(assign));
            }
        }
    }

    void lower_region(const Region *r, RegisterFile &regs, std::vector<Stmt> &out) {
        switch (r->kind) {
        case RegionKind::Block:
            lower_block(r->block_id, regs, out);
            return;

        case RegionKind::Linear:
            for (const Region *c : r->children)
                lower_region(c, regs, out);
            return;

        case RegionKind::IfThen:
        case RegionKind::IfElse: {
            const bool has_else = r->kind == RegionKind::IfElse;
            lower_region(r->children[0], regs, out);

            ExprPtr taken = taken_cond(r->cond.cc, r->cond.mask_source, regs);
            ExprPtr cond = r->cond.then_is_taken ? taken : negate_condition(taken);
            cond = fold(cond);

            RegisterFile then_state = snapshot(regs);
            std::vector<Stmt> then_body;
            lower_region(r->children[1], then_state, then_body);

            RegisterFile else_state = snapshot(regs);
            std::vector<Stmt> else_body;
            if (has_else)
                lower_region(r->children[2], else_state, else_body);

            std::vector<bool> live(kNumRegIds, true);
            if (r->join_block >= 0 && size_t(r->join_block) < live_in.size())
                live = live_in[size_t(r->join_block)];

            JoinResult join = merge_at_join(then_state, else_state, live, ctx);
            emit_join(join, has_else, out, then_body, else_body);
            regs = std::move(join.regs);

            Stmt ifs;
            ifs.kind = StmtKind::If;
            ifs.cond = cond;
            ifs.then_body = std::move(then_body);
            ifs.else_body = std::move(else_body);
            out.push_back(std::move(ifs));

            if (r->join_absorbed)
                lower_region(r->children.back(), regs, out);
            return;
        }
        }
    }

    std::string block_label(int id) const {
        const BasicBlock &b = cfg.block(id);
        if (!b.labels.empty())
            return b.labels.front();
        std::ostringstream os;
        os << "bb" << id;
        return os.str();
    }

    // Unstructured fallback: every reachable block becomes a labeled chunk
    // ending in gotos. Register state cannot flow across the labels, so
    // each block starts from an unbound file and reads surface as
    // variables.
    void lower_goto_form(std::vector<Stmt> &out) {
        if (ctx.sink)
            ctx.sink->warning(0, "control flow not fully structured; emitting labeled blocks");

        std::vector<int> order;
        order.push_back(cfg.entry);
        for (const BasicBlock &b : cfg.blocks)
            if (b.id != cfg.entry && b.reachable && !b.mask_absorbed)
                order.push_back(b.id);

        for (int id : order) {
            const BasicBlock &b = cfg.block(id);
            Stmt label;
            label.kind = StmtKind::Label;
            label.label = block_label(id);
            out.push_back(std::move(label));

            RegisterFile regs =
                id == cfg.entry && ctx.config ? initial_register_state(*ctx.config)
                                              : RegisterFile{};
            lower_block(id, regs, out);

            const Terminator &t = b.term;
            switch (t.kind) {
            case TermKind::Fallthrough:
            case TermKind::Unconditional: {
                Stmt g;
                g.kind = StmtKind::Goto;
                g.label = block_label(t.taken);
                out.push_back(std::move(g));
                break;
            }
            case TermKind::Conditional: {
                ExprPtr cond = taken_cond(t.cc, t.mask_source, regs);
                if (!cond) {
                    // Exec-mask branch: keep the instruction text, follow
                    // the fall-through edge.
                    if (ctx.sink)
                        ctx.sink->warning(t.line, "exec-dependent branch kept as inline asm");
                    Stmt raw;
                    raw.kind = StmtKind::Basic;
                    raw.base.kind = StatementKind::RawAsm;
                    raw.base.text = b.instructions.back().source_text;
                    raw.base.line = t.line;
                    out.push_back(std::move(raw));
                    ++fallbacks;
                } else {
                    Stmt g;
                    g.kind = StmtKind::Goto;
                    g.cond = fold(cond);
                    g.label = block_label(t.taken);
                    out.push_back(std::move(g));
                }
                Stmt fall;
                fall.kind = StmtKind::Goto;
                fall.label = block_label(t.not_taken >= 0 ? t.not_taken : t.taken);
                out.push_back(std::move(fall));
                break;
            }
            case TermKind::EndOfProgram:
                break;
            }
        }
    }
};

} // namespace

LoweredBody lower_kernel(const Cfg &cfg, const ReduceResult &regions, const StepContext &ctx) {
    LoweredBody body;
    Lowerer lw(cfg, ctx);

    if (regions.reduced && regions.root) {
        RegisterFile regs =
            ctx.config ? initial_register_state(*ctx.config) : RegisterFile{};
        lw.lower_region(regions.root, regs, body.stmts);
    } else {
        lw.lower_goto_form(body.stmts);
    }

    body.fallback_count = lw.fallbacks;
    return body;
}

} // namespace ocldec
