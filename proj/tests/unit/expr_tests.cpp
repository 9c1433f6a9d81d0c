// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "ocldec/abi_model.hpp"
#include "ocldec/asm_frontend.hpp"
#include "ocldec/codegen.hpp"
#include "ocldec/expr.hpp"
#include "ocldec/lower.hpp"
#include "ocldec/oracle.hpp"
#include "ocldec/sym_state.hpp"

using namespace ocldec;

namespace {

ExprPtr u32(uint32_t v) { return Expr::constant(v, DataType::unsigned_int(32)); }

ExprPtr gid0() {
    return Expr::builtin_ref({BuiltinFn::GlobalId, 0}, DataType::unsigned_int(64));
}

} // namespace

TEST_CASE("factories fold trivial algebra") {
    ExprPtr x = Expr::var_ref("x", DataType::unsigned_int(32));
    DataType t = DataType::unsigned_int(32);

    CHECK(expr_equal(Expr::binary(BinaryOp::Add, x, u32(0), t), x));
    CHECK(expr_equal(Expr::binary(BinaryOp::Add, u32(0), x, t), x));
    CHECK(expr_equal(Expr::binary(BinaryOp::Mul, x, u32(1), t), x));

    ExprPtr sum = Expr::binary(BinaryOp::Add, u32(3), u32(4), t);
    REQUIRE(sum->is_const());
    CHECK(sum->const_value == 7);

    ExprPtr shifted = Expr::binary(BinaryOp::Shl, u32(3), u32(4), t);
    REQUIRE(shifted->is_const());
    CHECK(shifted->const_value == 48);
}

TEST_CASE("structural equality compares trees, not pointers") {
    DataType t = DataType::unsigned_int(32);
    ExprPtr a = Expr::binary(BinaryOp::Add, Expr::var_ref("v1", t), u32(5), t);
    ExprPtr b = Expr::binary(BinaryOp::Add, Expr::var_ref("v1", t), u32(5), t);
    ExprPtr c = Expr::binary(BinaryOp::Add, Expr::var_ref("v2", t), u32(5), t);
    CHECK(expr_equal(a, b));
    CHECK(!expr_equal(a, c));
    CHECK(!expr_equal(u32(5), Expr::constant(5, DataType::unsigned_int(64))));
}

TEST_CASE("condition negation flips comparison operators") {
    DataType t = DataType::signed_int(32);
    ExprPtr x = Expr::var_ref("x", t);
    ExprPtr lt = Expr::binary(BinaryOp::CmpLt, x, u32(4), t);
    ExprPtr ge = negate_condition(lt);
    REQUIRE(ge->kind == ExprKind::Binary);
    CHECK(ge->bin_op == BinaryOp::CmpGe);
    CHECK(expr_equal(negate_condition(ge), lt));

    // non-comparisons get a logical not
    ExprPtr truthy = Expr::var_ref("flag", t);
    ExprPtr noted = negate_condition(truthy);
    REQUIRE(noted->kind == ExprKind::Unary);
    CHECK(noted->un_op == UnaryOp::LogicalNot);
}

TEST_CASE("add-term flattening") {
    DataType t = DataType::unsigned_int(32);
    ExprPtr x = Expr::var_ref("x", t);
    ExprPtr y = Expr::var_ref("y", t);
    ExprPtr e = Expr::binary(BinaryOp::Add, Expr::binary(BinaryOp::Add, x, y, t), u32(9), t);
    std::vector<ExprPtr> terms;
    collect_add_terms(e, terms);
    REQUIRE(terms.size() == 3);
    CHECK(expr_equal(terms[0], x));
    CHECK(expr_equal(terms[1], y));
    CHECK(terms[2]->is_const(9));
}

TEST_CASE("constant rendering follows source conventions") {
    CHECK(render_expr(u32(7)) == "7");
    CHECK(render_expr(u32(4095)) == "4095");
    CHECK(render_expr(u32(4096)) == "0x1000");
    CHECK(render_expr(Expr::constant(0xfffffffbull, DataType::signed_int(32))) == "-5");
    CHECK(render_expr(Expr::constant(0x100000000ull, DataType::unsigned_int(64))) ==
          "0x100000000ul");

    // float bit patterns: exact small values print as literals, the rest
    // keep their bits
    CHECK(render_expr(Expr::constant(0x40000000u, DataType::float_type(32))) == "2.0f");
    CHECK(render_expr(Expr::constant(0x40490fdbu, DataType::float_type(32))) ==
          "as_float(0x40490fdbu)");
}

TEST_CASE("builtin rendering") {
    CHECK(render_expr(gid0()) == "get_global_id(0)");
    CHECK(render_expr(Expr::builtin_ref({BuiltinFn::WorkDim, 0}, DataType::unsigned_int(32))) ==
          "get_work_dim()");
    CHECK(render_expr(Expr::builtin_ref({BuiltinFn::LocalSize, 2}, DataType::unsigned_int(32))) ==
          "get_local_size(2)");
}

namespace {

// Minimal context for driving step() directly.
struct StepRig {
    KernelConfig config;
    AbiMap abi;
    DiagnosticSink sink;
    std::vector<std::pair<std::string, DataType>> fresh;
    std::set<std::string> names;
    StepContext ctx;

    StepRig() {
        config.name = "t";
        config.useargs = true;
        ArgDecl data;
        data.name = "data";
        data.type = DataType::signed_int(32).pointer_to(AddressSpace::Global);
        ArgDecl x;
        x.name = "x";
        x.type = DataType::signed_int(32);
        // implicit block first, so data lands at 0x30
        for (int i = 0; i < 6; ++i) {
            ArgDecl imp;
            imp.name = i < 3 ? "_.global_offset_" + std::to_string(i) : "_.pad_" + std::to_string(i);
            imp.type = DataType::signed_int(64);
            imp.is_implicit = true;
            config.args.push_back(imp);
        }
        config.args.push_back(data);
        config.args.push_back(x);
        abi = build_abi_map(config, sink, {});
        ctx.config = &config;
        ctx.abi = &abi;
        ctx.sink = &sink;
        ctx.fresh_vars = &fresh;
        ctx.name_pool = &names;
    }

    RegisterFile start() { return initial_register_state(config); }

    StepResult run(RegisterFile regs, std::initializer_list<const char *> lines) {
        StepResult res;
        res.regs = std::move(regs);
        int line = 1;
        for (const char *text : lines) {
            Instruction ins = parse_instruction(text, line++, sink);
            REQUIRE(!ins.parse_failed);
            StepResult one = step(res.regs, ins, ctx);
            res.regs = std::move(one.regs);
            for (auto &s : one.stmts)
                res.stmts.push_back(std::move(s));
        }
        return res;
    }
};

} // namespace

TEST_CASE("a settings load resolves to the kernel argument") {
    StepRig rig;
    StepResult res = rig.run(rig.start(), {"s_load_dwordx2 s[0:1], s[4:5], 0x30",
                                           "s_load_dword s2, s[4:5], 0x38"});
    CHECK(res.stmts.empty());

    // s[0:1] now carries the pointer argument; moving its halves through
    // vector registers and reading them back as a pair re-fuses the value.
    res = rig.run(std::move(res.regs), {"v_mov_b32 v4, s0", "v_mov_b32 v5, s1"});
    Operand pair;
    pair.kind = OperandKind::VReg;
    pair.first = 4;
    pair.count = 2;
    ExprPtr whole = read_pair(res.regs, pair, rig.ctx);
    REQUIRE(whole != nullptr);
    CHECK(whole->kind == ExprKind::KernelArg);
    CHECK(whole->name == "data");
}

TEST_CASE("unsupported instructions fall back to raw asm statements") {
    StepRig rig;
    StepResult res = rig.run(rig.start(), {"ds_read_b32 v2, v1"});
    REQUIRE(res.stmts.size() == 1);
    CHECK(res.stmts[0].kind == StatementKind::RawAsm);
    CHECK(res.stmts[0].text == "ds_read_b32 v2, v1");
}

TEST_CASE("join merging is order-insensitive and version-aware") {
    StepRig rig;
    RegisterFile base = rig.start();

    // Both arms write v3 with different values; v4 goes untouched.
    StepResult then_side = rig.run(snapshot(base), {"v_mov_b32 v3, 7"});
    StepResult else_side = rig.run(snapshot(base), {"v_mov_b32 v3, 9"});

    std::vector<bool> live(kNumRegIds, true);
    JoinResult ab = merge_at_join(then_side.regs, else_side.regs, live, rig.ctx);
    REQUIRE(ab.fixups.size() == 1);
    CHECK(ab.fixups[0].then_value->is_const(7));
    CHECK(ab.fixups[0].else_value->is_const(9));

    std::set<std::string> names2;
    auto ctx2 = rig.ctx;
    ctx2.name_pool = &names2;
    JoinResult ba = merge_at_join(else_side.regs, then_side.regs, live, ctx2);
    REQUIRE(ba.fixups.size() == 1);
    CHECK(ba.fixups[0].var_name == ab.fixups[0].var_name);
    CHECK(ba.fixups[0].then_value->is_const(9));
    CHECK(ba.fixups[0].else_value->is_const(7));

    // Identical writes on both sides merge silently.
    StepResult same_a = rig.run(snapshot(base), {"v_mov_b32 v3, 7"});
    StepResult same_b = rig.run(snapshot(base), {"v_mov_b32 v3, 7"});
    std::set<std::string> names3;
    auto ctx3 = rig.ctx;
    ctx3.name_pool = &names3;
    JoinResult same = merge_at_join(same_a.regs, same_b.regs, live, ctx3);
    CHECK(same.fixups.empty());
}

TEST_CASE("pristine memory is a pure function of address and seed") {
    OracleEnv env;
    CHECK(env.initial_memory(0x0) == 0xa1b965f4u);
    CHECK(env.initial_memory(0x104000000000ull) == 0xa0cd3817u);
    CHECK(env.initial_memory(0x104000000004ull) == 0x49cb2f3cu);
    CHECK(env.initial_memory(0xf000000000000000ull) == 0x8c55af3eu);

    OracleEnv other;
    other.mem_seed = 1;
    CHECK(other.initial_memory(0x104000000000ull) == 0x4baf427eu);

    // repeated calls agree
    CHECK(env.initial_memory(0x104000000000ull) == env.initial_memory(0x104000000000ull));
}

TEST_CASE("the evaluator walks statements and records ordered writes") {
    KernelConfig config;
    config.name = "t";
    OracleEnv env;

    LoweredBody body;
    Stmt decl;
    decl.kind = StmtKind::Basic;
    decl.base.kind = StatementKind::Decl;
    decl.base.name = "v";
    decl.base.decl_type = DataType::unsigned_int(32);
    decl.base.value = Expr::constant(3, DataType::unsigned_int(32));
    body.stmts.push_back(decl);

    Stmt store;
    store.kind = StmtKind::Basic;
    store.base.kind = StatementKind::Store;
    store.base.addr = Expr::c64(0x1000);
    store.base.value = Expr::var_ref("v", DataType::unsigned_int(32));
    store.base.elem_type = DataType::unsigned_int(32);
    body.stmts.push_back(store);

    Stmt guarded;
    guarded.kind = StmtKind::If;
    guarded.cond = Expr::binary(BinaryOp::CmpLtU, Expr::var_ref("v", DataType::unsigned_int(32)),
                                Expr::constant(10, DataType::unsigned_int(32)),
                                DataType::signed_int(32));
    Stmt inner = store;
    inner.base.addr = Expr::c64(0x1004);
    guarded.then_body.push_back(inner);
    body.stmts.push_back(guarded);

    WriteTrace trace = evaluate_decompiled(body, config, env);
    REQUIRE(trace.size() == 2);
    CHECK(trace[0].addr == 0x1000);
    CHECK(trace[0].value == 3);
    CHECK(trace[1].addr == 0x1004);
    CHECK(trace[1].value == 3);
}

TEST_CASE("the evaluator refuses raw assembly and gotos") {
    KernelConfig config;
    OracleEnv env;

    LoweredBody asm_body;
    Stmt raw;
    raw.kind = StmtKind::Basic;
    raw.base.kind = StatementKind::RawAsm;
    raw.base.text = "ds_read_b32 v2, v1";
    asm_body.stmts.push_back(raw);
    CHECK_THROWS_AS(evaluate_decompiled(asm_body, config, env), OracleUnsupported);

    LoweredBody goto_body;
    Stmt label;
    label.kind = StmtKind::Label;
    label.label = "L1";
    goto_body.stmts.push_back(label);
    CHECK_THROWS_AS(evaluate_decompiled(goto_body, config, env), OracleUnsupported);
}

TEST_CASE("the interpreter executes a minimal store kernel") {
    DiagnosticSink sink;
    std::string text = ".kernel t\n    .config\n        .dims x\n        .useargs\n"
                       "        .arg _.global_offset_0, \"size_t\", long\n"
                       "        .arg _.global_offset_1, \"size_t\", long\n"
                       "        .arg _.global_offset_2, \"size_t\", long\n"
                       "        .arg _.printf_buffer, \"size_t\", void*, global, , rdonly\n"
                       "        .arg _.vqueue_pointer, \"size_t\", long\n"
                       "        .arg _.aqlwrap_pointer, \"size_t\", long\n"
                       "        .arg out, \"uint*\", uint*, global\n"
                       "    .text\n"
                       "        s_load_dwordx2 s[0:1], s[4:5], 0x30\n"
                       "        s_waitcnt lgkmcnt(0)\n"
                       "        v_mov_b32 v3, s0\n"
                       "        v_mov_b32 v4, s1\n"
                       "        v_mov_b32 v5, 42\n"
                       "        flat_store_dword v[3:4], v5\n"
                       "        s_endpgm\n";
    std::vector<KernelSection> sections = split_kernels(text);
    REQUIRE(sections.size() == 1);
    KernelConfig config = parse_config(sections[0], sink);
    std::vector<Instruction> ins = parse_text(sections[0], sink);
    AbiMap abi = build_abi_map(config, sink, {});

    OracleEnv env;
    env.arg_values["out"] = 0x2000;
    WriteTrace trace = interpret_asm(ins, config, abi, env);
    REQUIRE(trace.size() == 1);
    CHECK(trace[0].addr == 0x2000);
    CHECK(trace[0].value == 42);
}

TEST_CASE("the interpreter rejects instructions outside the subset") {
    DiagnosticSink sink;
    std::string text = ".kernel t\n    .config\n        .dims x\n    .text\n"
                       "        ds_read_b32 v2, v1\n"
                       "        s_endpgm\n";
    std::vector<KernelSection> sections = split_kernels(text);
    KernelConfig config = parse_config(sections[0], sink);
    std::vector<Instruction> ins = parse_text(sections[0], sink);
    AbiMap abi = build_abi_map(config, sink, {});
    OracleEnv env;
    CHECK_THROWS_AS(interpret_asm(ins, config, abi, env), OracleUnsupported);
}
