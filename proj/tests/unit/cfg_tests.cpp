// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "ocldec/cfg.hpp"
#include "ocldec/structurizer.hpp"

#include "corpus.hpp"
#include "nestgen.hpp"

using namespace ocldec;
using ocldec_tests::SkelNode;
using ocldec_tests::corpus_kernel;
using ocldec_tests::skel_equal;
using ocldec_tests::skeleton_of;

namespace {

// Parses a bare instruction body (no .kernel wrapper) into a flow graph.
Cfg cfg_from_body(const std::string &body, DiagnosticSink &sink) {
    std::string listing = ".kernel t\n    .config\n        .dims x\n    .text\n" + body;
    std::vector<KernelSection> sections = split_kernels(listing);
    REQUIRE(sections.size() == 1);
    std::vector<Instruction> ins = parse_text(sections[0], sink);
    return build_cfg(ins, sink);
}

// Full front half of the pipeline for one corpus kernel: flow graph,
// exec-mask normalization, region reduction. Returns the reduction result;
// the graph lives in *graph_out.
ReduceResult reduce_corpus(const std::string &name, RegionGraph &graph_out,
                           DiagnosticSink &sink, int *rewrites = nullptr) {
    const std::string &listing = corpus_kernel(name).listing;
    std::vector<KernelSection> sections = split_kernels(listing);
    REQUIRE(sections.size() == 1);
    std::vector<Instruction> ins = parse_text(sections[0], sink);
    Cfg cfg = build_cfg(ins, sink);
    annotate_exec(cfg);
    int n = normalize_if_else(cfg, sink);
    if (rewrites)
        *rewrites = n;
    graph_out = RegionGraph::from_cfg(cfg);
    return reduce(graph_out);
}

SkelNode leaf(bool has_else) { return SkelNode{has_else, {}, {}}; }

} // namespace

TEST_CASE("branches and labels split the instruction stream into blocks") {
    DiagnosticSink sink;
    Cfg cfg = cfg_from_body("        s_cmp_lt_u32 s2, 5\n"
                            "        s_cbranch_scc1 L_then\n"
                            "        v_mov_b32 v3, 1\n"
                            "        s_branch L_end\n"
                            "L_then:\n"
                            "        v_mov_b32 v3, 2\n"
                            "L_end:\n"
                            "        flat_store_dword v[4:5], v3\n"
                            "        s_endpgm\n",
                            sink);

    REQUIRE(cfg.blocks.size() == 4);
    CHECK(cfg.entry == 0);

    const BasicBlock &b0 = cfg.block(0);
    CHECK(b0.term.kind == TermKind::Conditional);
    CHECK(b0.term.cc == CondCode::Scc1);
    CHECK(b0.term.taken == 2);
    CHECK(b0.term.not_taken == 1);

    const BasicBlock &b1 = cfg.block(1);
    CHECK(b1.term.kind == TermKind::Unconditional);
    CHECK(b1.term.taken == 3);

    const BasicBlock &b2 = cfg.block(2);
    REQUIRE(!b2.labels.empty());
    CHECK(b2.labels.front() == "L_then");
    CHECK(b2.term.kind == TermKind::Fallthrough);
    CHECK(b2.term.taken == 3);

    const BasicBlock &b3 = cfg.block(3);
    CHECK(b3.term.kind == TermKind::EndOfProgram);
    CHECK(b3.preds.size() == 2);
    CHECK(b3.labels.front() == "L_end");
}

TEST_CASE("an undefined branch target is a hard error") {
    DiagnosticSink sink;
    CHECK_THROWS_AS(cfg_from_body("        s_branch L_nowhere\n        s_endpgm\n", sink),
                    ParseError);
}

TEST_CASE("code after an unconditional exit is flagged unreachable") {
    DiagnosticSink sink;
    Cfg cfg = cfg_from_body("        s_endpgm\n"
                            "L_dead:\n"
                            "        v_mov_b32 v3, 1\n"
                            "        s_endpgm\n",
                            sink);
    REQUIRE(cfg.blocks.size() == 2);
    CHECK(cfg.block(0).reachable);
    CHECK(!cfg.block(1).reachable);
}

TEST_CASE("exec-mask bookkeeping is classified in place") {
    DiagnosticSink sink;
    Cfg cfg = cfg_from_body("        v_cmp_lt_u32 vcc, v0, 5\n"
                            "        s_and_saveexec_b64 s[10:11], vcc\n"
                            "        v_mov_b32 v3, 1\n"
                            "        s_xor_b64 exec, s[10:11], exec\n"
                            "        v_mov_b32 v3, 2\n"
                            "        s_or_b64 exec, exec, s[10:11]\n"
                            "        s_mov_b64 exec, s[12:13]\n"
                            "        s_endpgm\n",
                            sink);
    annotate_exec(cfg);
    REQUIRE(cfg.blocks.size() == 1);
    const std::vector<ExecOp> &ops = cfg.block(0).exec_ops;
    REQUIRE(ops.size() == 4);

    CHECK(ops[0].kind == ExecOpKind::Save);
    CHECK(ops[0].index == 1);
    CHECK(ops[0].mask_sgpr == 10);
    CHECK(ops[0].source.is_special(SpecialReg::Vcc));

    CHECK(ops[1].kind == ExecOpKind::Invert);
    CHECK(ops[1].index == 3);
    CHECK(ops[1].mask_sgpr == 10);

    CHECK(ops[2].kind == ExecOpKind::Restore);
    CHECK(ops[2].index == 5);
    CHECK(ops[2].mask_sgpr == 10);

    CHECK(ops[3].kind == ExecOpKind::Restore);
    CHECK(ops[3].index == 6);
    CHECK(ops[3].mask_sgpr == 12);
}

TEST_CASE("a masked if with an execz bypass becomes a conditional diamond") {
    DiagnosticSink sink;
    RegionGraph graph;
    int rewrites = 0;
    ReduceResult res = reduce_corpus("guard", graph, sink, &rewrites);

    CHECK(rewrites == 1);
    REQUIRE(res.reduced);
    CHECK(skel_equal(skeleton_of(res.root), {leaf(false)}));
}

TEST_CASE("a masked if with no jumps at all is recognized") {
    DiagnosticSink sink;
    RegionGraph graph;
    int rewrites = 0;
    ReduceResult res = reduce_corpus("guard_nobypass", graph, sink, &rewrites);

    CHECK(rewrites == 1);
    REQUIRE(res.reduced);
    CHECK(skel_equal(skeleton_of(res.root), {leaf(false)}));
}

TEST_CASE("masked if-else layouts normalize to the same diamond") {
    // Three hardware layouts of the same source construct: with a bypass
    // jump and a skip jump, with the else body inside the inversion block,
    // and with a fall-through header.
    for (const char *name : {"ifelse_form1", "select_masked", "ifelse_form3"}) {
        CAPTURE(name);
        DiagnosticSink sink;
        RegionGraph graph;
        int rewrites = 0;
        ReduceResult res = reduce_corpus(name, graph, sink, &rewrites);

        CHECK(rewrites == 1);
        REQUIRE(res.reduced);
        CHECK(skel_equal(skeleton_of(res.root), {leaf(true)}));
    }
}

TEST_CASE("nested and sequential masked regions structure independently") {
    {
        DiagnosticSink sink;
        RegionGraph graph;
        int rewrites = 0;
        ReduceResult res = reduce_corpus("nested_masked", graph, sink, &rewrites);
        CHECK(rewrites == 2);
        REQUIRE(res.reduced);
        std::vector<SkelNode> expect{SkelNode{false, {leaf(true)}, {}}};
        CHECK(skel_equal(skeleton_of(res.root), expect));
    }
    {
        DiagnosticSink sink;
        RegionGraph graph;
        int rewrites = 0;
        ReduceResult res = reduce_corpus("sequential_masked", graph, sink, &rewrites);
        CHECK(rewrites == 2);
        REQUIRE(res.reduced);
        CHECK(skel_equal(skeleton_of(res.root), {leaf(false), leaf(false)}));
    }
}

TEST_CASE("uniform scc branches structure without any mask rewriting") {
    {
        DiagnosticSink sink;
        RegionGraph graph;
        int rewrites = 0;
        ReduceResult res = reduce_corpus("pick", graph, sink, &rewrites);
        CHECK(rewrites == 0);
        REQUIRE(res.reduced);
        CHECK(skel_equal(skeleton_of(res.root), {leaf(true)}));
    }
    {
        DiagnosticSink sink;
        RegionGraph graph;
        ReduceResult res = reduce_corpus("scc_if", graph, sink);
        REQUIRE(res.reduced);
        CHECK(skel_equal(skeleton_of(res.root), {leaf(false)}));
    }
}

TEST_CASE("a backward branch leaves the graph unreduced") {
    DiagnosticSink sink;
    RegionGraph graph;
    ReduceResult res = reduce_corpus("loop_goto", graph, sink);
    CHECK(!res.reduced);
    CHECK(res.root == nullptr);
    CHECK(res.residue.size() > 1);
}

TEST_CASE("the reducer merges a diamond ladder bottom-up") {
    // Six blocks, three nested single-armed conditionals sharing one exit:
    //
    //   1 -> 2 -> 3 -> 4 -> 5      every header also jumps to 6
    //   1 -> 6, 2 -> 6, 4 -> 6, 5 -> 6
    //
    // The innermost if has to merge first; each merge re-enables the next
    // one out. The exit block joins only the final merge, when its two
    // remaining predecessors are the outermost header and arm.
    RegionGraph g;
    Region *r1 = g.add_block(1);
    Region *r2 = g.add_block(2);
    Region *r3 = g.add_block(3);
    Region *r4 = g.add_block(4);
    Region *r5 = g.add_block(5);
    Region *r6 = g.add_block(6);
    g.set_entry(r1);
    g.add_edge(r1, r2);
    g.add_edge(r1, r6);
    g.add_edge(r2, r3);
    g.add_edge(r2, r6);
    g.add_edge(r3, r4);
    g.add_edge(r4, r5);
    g.add_edge(r4, r6);
    g.add_edge(r5, r6);

    ReduceResult res = reduce(g);

    REQUIRE(res.reduced);
    REQUIRE(res.merges.size() == 4);

    CHECK(res.merges[0].kind == RegionKind::IfThen);
    CHECK(res.merges[0].absorbed == std::vector<int>{4, 5});
    CHECK(res.merges[0].result == 7);

    CHECK(res.merges[1].kind == RegionKind::Linear);
    CHECK(res.merges[1].absorbed == std::vector<int>{3, 7});
    CHECK(res.merges[1].result == 8);

    CHECK(res.merges[2].kind == RegionKind::IfThen);
    CHECK(res.merges[2].absorbed == std::vector<int>{2, 8});
    CHECK(res.merges[2].result == 9);

    CHECK(res.merges[3].kind == RegionKind::IfThen);
    CHECK(res.merges[3].absorbed == std::vector<int>{1, 9, 6});
    CHECK(res.merges[3].result == 10);

    REQUIRE(res.root != nullptr);
    CHECK(res.root->id == 10);
    CHECK(res.root->kind == RegionKind::IfThen);
    CHECK(res.root->join_absorbed);
    CHECK(res.root->join_block == 6);
}

TEST_CASE("straight-line chains collapse into one linear region") {
    RegionGraph g;
    Region *r1 = g.add_block(1);
    Region *r2 = g.add_block(2);
    Region *r3 = g.add_block(3);
    g.set_entry(r1);
    g.add_edge(r1, r2);
    g.add_edge(r2, r3);

    ReduceResult res = reduce(g);
    REQUIRE(res.reduced);
    REQUIRE(res.merges.size() == 1);
    CHECK(res.merges[0].kind == RegionKind::Linear);
    CHECK(res.merges[0].absorbed == std::vector<int>{1, 2, 3});
    CHECK(res.root->children.size() == 3);
}

TEST_CASE("a synthetic cycle is left as residue") {
    RegionGraph g;
    Region *r1 = g.add_block(1);
    Region *r2 = g.add_block(2);
    Region *r3 = g.add_block(3);
    g.set_entry(r1);
    g.add_edge(r1, r2);
    g.add_edge(r2, r3);
    g.add_edge(r3, r2);

    ReduceResult res = reduce(g);
    CHECK(!res.reduced);
    CHECK(res.residue.size() >= 2);
}

TEST_CASE("the single-instruction conditional is recognized") {
    DiagnosticSink sink;
    Instruction pos = parse_instruction("v_cndmask_b32 v5, v3, v4, vcc", 1, sink);
    std::optional<TernaryInfo> info = detect_ternary(pos);
    REQUIRE(info.has_value());
    CHECK(info->dst == 5);
    CHECK(info->src0.is_vreg());
    CHECK(info->src0.first == 3);
    CHECK(info->src1.first == 4);
    CHECK(info->cond.is_special(SpecialReg::Vcc));

    Instruction sreg = parse_instruction("v_cndmask_b32 v5, v3, v4, s[12:13]", 2, sink);
    std::optional<TernaryInfo> info2 = detect_ternary(sreg);
    REQUIRE(info2.has_value());
    CHECK(info2->cond.is_sreg(12, 2));

    Instruction neg = parse_instruction("v_mov_b32 v5, v3", 3, sink);
    CHECK(!detect_ternary(neg).has_value());
}

TEST_CASE("region graphs render as DOT for debugging") {
    RegionGraph g;
    Region *r1 = g.add_block(1);
    Region *r2 = g.add_block(2);
    g.set_entry(r1);
    g.add_edge(r1, r2);
    std::string dot = region_graph_dot(g, "t");
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("->") != std::string::npos);
}
