// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "ocldec/abi_model.hpp"
#include "ocldec/asm_frontend.hpp"
#include "ocldec/diagnostics.hpp"
#include "ocldec/type_recovery.hpp"

using namespace ocldec;

TEST_CASE("mnemonic decomposition round-trips the full suffix grid") {
    const char bases[] = {'i', 'u', 'f', 'b'};
    const int widths[] = {8, 16, 24, 32, 64};
    const char *prefixes[] = {"s", "v"};
    const char *roots[] = {"mov", "add", "mul_hi", "cmp_lt", "lshlrev"};

    for (const char *p : prefixes)
        for (const char *r : roots)
            for (char b : bases)
                for (int w : widths) {
                    std::string m =
                        std::string(p) + "_" + r + "_" + b + std::to_string(w);
                    MnemonicParts parts = decompose_mnemonic(m);
                    CHECK(parts.prefix == p);
                    CHECK(parts.root == r);
                    REQUIRE(parts.suffixes.size() == 1);
                    CHECK(parts.suffixes[0].base == b);
                    CHECK(int(parts.suffixes[0].bits) == w);
                    CHECK(compose_mnemonic(parts) == m);
                }
}

TEST_CASE("double-suffix mnemonics keep both suffixes in order") {
    MnemonicParts parts = decompose_mnemonic("v_mul_hi_u32_u24");
    CHECK(parts.prefix == "v");
    CHECK(parts.root == "mul_hi");
    REQUIRE(parts.suffixes.size() == 2);
    CHECK(parts.suffixes[0].base == 'u');
    CHECK(parts.suffixes[0].bits == 32);
    CHECK(parts.suffixes[1].base == 'u');
    CHECK(parts.suffixes[1].bits == 24);
    CHECK(compose_mnemonic(parts) == "v_mul_hi_u32_u24");
}

TEST_CASE("non-suffix tails stay in the root") {
    MnemonicParts parts = decompose_mnemonic("flat_load_dwordx2");
    CHECK(parts.prefix == "flat");
    CHECK(parts.root == "load_dwordx2");
    CHECK(parts.suffixes.empty());
    CHECK(compose_mnemonic(parts) == "flat_load_dwordx2");

    parts = decompose_mnemonic("s_waitcnt");
    CHECK(parts.prefix == "s");
    CHECK(parts.root == "waitcnt");
    CHECK(compose_mnemonic(parts) == "s_waitcnt");
}

TEST_CASE("suffix type mapping") {
    CHECK(type_from_suffix({'i', 32}) == DataType::signed_int(32));
    CHECK(type_from_suffix({'u', 64}) == DataType::unsigned_int(64));
    CHECK(type_from_suffix({'f', 32}) == DataType::float_type(32));
    CHECK(type_from_suffix({'b', 64}) == DataType::binary(64));
    CHECK(!parse_type_suffix("dwordx2").has_value());
    CHECK(!parse_type_suffix("saveexec").has_value());
    CHECK(parse_type_suffix("u24").has_value());
}

TEST_CASE("operand parsing covers registers, pairs, specials, literals") {
    DiagnosticSink sink;
    Instruction i = parse_instruction("s_load_dwordx2 s[0:1], s[4:5], 0x30", 1, sink);
    CHECK(!i.parse_failed);
    REQUIRE(i.operands.size() == 3);
    CHECK(i.operands[0].is_sreg());
    CHECK(i.operands[0].first == 0);
    CHECK(i.operands[0].count == 2);
    CHECK(i.operands[1].first == 4);
    CHECK(i.operands[2].is_literal());
    CHECK(i.operands[2].value == 0x30);

    i = parse_instruction("v_add_u32 v0, vcc, s3, v0", 2, sink);
    REQUIRE(i.operands.size() == 4);
    CHECK(i.operands[0].is_vreg());
    CHECK(i.operands[1].is_special(SpecialReg::Vcc));
    CHECK(i.operands[2].is_sreg());
    CHECK(i.operands[3].is_vreg());

    i = parse_instruction("v_mov_b32 v5, -5", 3, sink);
    REQUIRE(i.operands.size() == 2);
    CHECK(i.operands[1].is_literal());
    CHECK(i.operands[1].value == -5);

    i = parse_instruction("s_mov_b64 exec, s[10:11]", 4, sink);
    REQUIRE(i.operands.size() == 2);
    CHECK(i.operands[0].is_special(SpecialReg::Exec));

    CHECK(sink.all().empty());
}

TEST_CASE("branch targets and waitcnt arguments are preserved as text") {
    DiagnosticSink sink;
    Instruction i = parse_instruction("s_cbranch_execz L_end", 1, sink);
    REQUIRE(i.operands.size() == 1);
    CHECK(i.operands[0].text == "L_end");

    i = parse_instruction("s_waitcnt lgkmcnt(0)", 2, sink);
    REQUIRE(i.operands.size() == 1);
    CHECK(i.operands[0].text == "lgkmcnt(0)");
}

TEST_CASE("parsing is insensitive to spacing but keeps the raw line") {
    DiagnosticSink sink;
    Instruction a = parse_instruction("v_add_u32 v0, vcc, s3, v0", 1, sink);
    Instruction b = parse_instruction("  v_add_u32   v0 ,vcc ,  s3,v0  ", 1, sink);
    CHECK(a.mnemonic == b.mnemonic);
    REQUIRE(a.operands.size() == b.operands.size());
    for (size_t n = 0; n < a.operands.size(); ++n) {
        CHECK(a.operands[n].kind == b.operands[n].kind);
        CHECK(a.operands[n].first == b.operands[n].first);
        CHECK(a.operands[n].count == b.operands[n].count);
    }
    CHECK(b.source_text == "v_add_u32   v0 ,vcc ,  s3,v0");
}

static const char *kTwoKernels = R"(.kernel alpha
    .config
        .dims x
        .useargs
        .arg data, "int*", int*, global
    .text
        s_endpgm
.kernel beta
    .config
        .dims xy
        .cws 16, 4, 1
        .arg n, "uint", uint
    .text
        s_nop 0
        s_endpgm
)";

TEST_CASE("kernel splitting and config parsing") {
    std::vector<KernelSection> sections = split_kernels(kTwoKernels);
    REQUIRE(sections.size() == 2);
    CHECK(sections[0].name == "alpha");
    CHECK(sections[1].name == "beta");

    DiagnosticSink sink;
    KernelConfig a = parse_config(sections[0], sink);
    CHECK(a.name == "alpha");
    CHECK(a.dims == 1);
    CHECK(a.useargs);
    REQUIRE(a.args.size() == 1);
    CHECK(a.args[0].name == "data");
    CHECK(a.args[0].type.is_pointer());
    CHECK(!a.args[0].is_implicit);

    KernelConfig b = parse_config(sections[1], sink);
    CHECK(b.dims == 2);
    CHECK(b.local_size(0) == 16);
    CHECK(b.local_size(1) == 4);
    CHECK(!b.useargs);

    std::vector<Instruction> body = parse_text(sections[1], sink);
    REQUIRE(body.size() == 2);
    CHECK(body[0].mnemonic == "s_nop");
    CHECK(body[1].mnemonic == "s_endpgm");
}

TEST_CASE("implicit arguments are recognized by name prefix") {
    std::string text = ".kernel k\n    .config\n        .dims x\n        .useargs\n"
                       "        .arg _.global_offset_0, \"size_t\", long\n"
                       "        .arg out, \"uint*\", uint*, global\n"
                       "    .text\n        s_endpgm\n";
    DiagnosticSink sink;
    std::vector<KernelSection> sections = split_kernels(text);
    REQUIRE(sections.size() == 1);
    KernelConfig c = parse_config(sections[0], sink);
    REQUIRE(c.args.size() == 2);
    CHECK(c.args[0].is_implicit);
    CHECK(!c.args[1].is_implicit);
}

namespace {

KernelConfig config_with_args(std::vector<ArgDecl> args, bool useargs) {
    KernelConfig c;
    c.name = "k";
    c.useargs = useargs;
    c.args = std::move(args);
    return c;
}

ArgDecl arg(const std::string &name, DataType t, bool implicit = false) {
    ArgDecl a;
    a.name = name;
    a.type = t;
    a.is_implicit = implicit;
    return a;
}

DataType ptr_to(DataType t) { return t.pointer_to(AddressSpace::Global); }

} // namespace

TEST_CASE("argument packing: sequential, aligned to max(4, size)") {
    DiagnosticSink sink;
    KernelConfig c = config_with_args({arg("a", DataType::signed_int(32)),
                                       arg("c", DataType::signed_int(8)),
                                       arg("s", DataType::signed_int(16)),
                                       arg("l", DataType::signed_int(64)),
                                       arg("p", ptr_to(DataType::signed_int(32)))},
                                      false);
    AbiMap map = build_abi_map(c, sink, {});

    const AbiEntry *e = map.find(0x0, 1);
    REQUIRE(e != nullptr);
    CHECK(e->arg_index == 0);

    // char and short each take a padded 4-byte slot.
    e = map.find(0x4, 1);
    REQUIRE(e != nullptr);
    CHECK(e->arg_index == 1);
    e = map.find(0x8, 1);
    REQUIRE(e != nullptr);
    CHECK(e->arg_index == 2);

    // the long skips to the next 8-byte boundary
    e = map.find(0x10, 2);
    REQUIRE(e != nullptr);
    CHECK(e->arg_index == 3);
    e = map.find(0x18, 2);
    REQUIRE(e != nullptr);
    CHECK(e->arg_index == 4);
}

TEST_CASE("the implicit block places user arguments at 0x30") {
    DiagnosticSink sink;
    DataType lng = DataType::signed_int(64);
    KernelConfig c = config_with_args(
        {arg("_.global_offset_0", lng, true), arg("_.global_offset_1", lng, true),
         arg("_.global_offset_2", lng, true), arg("_.printf_buffer", ptr_to(lng), true),
         arg("_.vqueue_pointer", lng, true), arg("_.aqlwrap_pointer", lng, true),
         arg("data", ptr_to(DataType::signed_int(32))), arg("x", DataType::signed_int(32))},
        true);
    AbiMap map = build_abi_map(c, sink, {});

    const AbiEntry *e = map.find(0x30, 2);
    REQUIRE(e != nullptr);
    CHECK(e->arg_index == 6);
    e = map.find(0x38, 1);
    REQUIRE(e != nullptr);
    CHECK(e->arg_index == 7);
}

TEST_CASE("builtin slots answer the known kernarg offsets") {
    DiagnosticSink sink;
    KernelConfig c = config_with_args({}, true);
    AbiMap map = build_abi_map(c, sink, {});

    const AbiEntry *e = map.find(0x0, 2);
    REQUIRE(e != nullptr);
    REQUIRE(e->builtin.has_value());
    CHECK(e->builtin->fn == BuiltinFn::GlobalOffset);
    CHECK(e->builtin->dim == 0);

    bool half = false;
    e = map.find_dword(0xc, &half);
    REQUIRE(e != nullptr);
    REQUIRE(e->builtin.has_value());
    CHECK(e->builtin->fn == BuiltinFn::GlobalSize);
    CHECK(e->builtin->dim == 0);
    CHECK(!half);

    // 0x10 is ambiguous by offset alone; the load width picks the slot.
    e = map.find(0x10, 2);
    REQUIRE(e != nullptr);
    CHECK(e->builtin->fn == BuiltinFn::GlobalOffset);
    CHECK(e->builtin->dim == 2);
    e = map.find(0x10, 1);
    REQUIRE(e != nullptr);
    CHECK(e->builtin->fn == BuiltinFn::GlobalSize);
    CHECK(e->builtin->dim == 1);

    e = map.find_dword(0x14, &half);
    REQUIRE(e != nullptr);
    CHECK(e->builtin->fn == BuiltinFn::GlobalSize);
    CHECK(e->builtin->dim == 2);

    e = map.find_dword(0x20010, &half);
    REQUIRE(e != nullptr);
    CHECK(e->builtin->fn == BuiltinFn::WorkDim);
}

TEST_CASE("without useargs there are no builtin slots") {
    DiagnosticSink sink;
    KernelConfig c = config_with_args({arg("a", DataType::signed_int(32))}, false);
    AbiMap map = build_abi_map(c, sink, {});
    bool half = false;
    CHECK(map.find_dword(0xc, &half) == nullptr);
    CHECK(map.find_dword(0x20010, &half) == nullptr);
}

TEST_CASE("abi overrides reassign offsets") {
    DiagnosticSink sink;
    std::vector<AbiOverride> ov =
        parse_abi_overrides("# remap\n0x40:1 = arg:n\n0x48:1 = global_size:1\n", sink);
    REQUIRE(ov.size() == 2);

    KernelConfig c = config_with_args({arg("n", DataType::unsigned_int(32))}, false);
    AbiMap map = build_abi_map(c, sink, ov);
    bool half = false;
    const AbiEntry *e = map.find_dword(0x40, &half);
    REQUIRE(e != nullptr);
    CHECK(e->arg_index == 0);
    e = map.find_dword(0x48, &half);
    REQUIRE(e != nullptr);
    REQUIRE(e->builtin.has_value());
    CHECK(e->builtin->fn == BuiltinFn::GlobalSize);
    CHECK(e->builtin->dim == 1);
}

TEST_CASE("labels attach to the following instruction") {
    std::string text = ".kernel k\n    .config\n        .dims x\n    .text\n"
                       "        s_branch L_x\n"
                       "L_x:\n"
                       "        s_endpgm\n";
    DiagnosticSink sink;
    std::vector<KernelSection> sections = split_kernels(text);
    REQUIRE(sections.size() == 1);
    std::vector<Instruction> body = parse_text(sections[0], sink);
    REQUIRE(body.size() == 2);
    CHECK(body[1].labels == std::vector<std::string>{"L_x"});
}

TEST_CASE("malformed register ranges produce diagnostics") {
    DiagnosticSink sink;
    Instruction i = parse_instruction("s_load_dwordx2 s[1:0], s[4:5], 0x0", 7, sink);
    CHECK((i.parse_failed || !sink.all().empty()));
}
