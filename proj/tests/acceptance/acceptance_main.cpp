// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
// Release gate. Each check prints one PASS/FAIL line; the process exits
// nonzero if any check fails. Thresholds are fixed here, not configurable:
// changing them is a release decision, not a test-run decision.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ocldec/decompiler.hpp"

#include "corpus.hpp"
#include "envgen.hpp"
#include "grammar.hpp"
#include "nestgen.hpp"

using namespace ocldec;
using ocldec_tests::CorpusKernel;
using ocldec_tests::NestSpec;

namespace {

constexpr double kMaxSuffixMillis = 1.0;    // per-mnemonic round-trip budget
constexpr double kMaxReplayMillis = 10.0;   // six-block reduction replay budget
constexpr double kMaxNestSeconds = 30.0;    // total budget for the nest sweep
constexpr int kNestCount = 1000;
constexpr size_t kEnvsPerKernel = 100;
constexpr size_t kMinComparableKernels = 20;

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

uint64_t fnv1a(const std::string &s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void fail(const std::string &why) {
        ok = false;
        if (detail.tellp() > 0)
            detail << "; ";
        detail << why;
    }
};

// 1. Every typed mnemonic in the suffix grid survives a decompose/compose
//    round trip, with the type suffixes recognized, in at most 1 ms each.
Check check_suffix_grid() {
    Check c;
    const char bases[] = {'i', 'u', 'f', 'b'};
    const int widths[] = {8, 16, 24, 32, 64};

    int count = 0;
    double worst = 0.0;
    for (const char *prefix : {"s", "v"}) {
        for (const char *root : {"mov", "add", "mul_hi", "cmp_lt", "lshlrev"}) {
            for (char base : bases) {
                for (int width : widths) {
                    std::string name = std::string(prefix) + "_" + root + "_" + base +
                                       std::to_string(width);
                    auto t0 = std::chrono::steady_clock::now();
                    MnemonicParts parts = decompose_mnemonic(name);
                    std::string back = compose_mnemonic(parts);
                    worst = std::max(worst, ms_since(t0));
                    ++count;

                    if (back != name) {
                        c.fail(name + " came back as " + back);
                        return c;
                    }
                    if (parts.suffixes.empty() || parts.suffixes.back().base != base ||
                        parts.suffixes.back().bits != width) {
                        c.fail(name + " lost its type suffix");
                        return c;
                    }
                }
            }
        }
    }

    // Two-suffix forms: the data width and the narrowed source width both
    // survive, in source order.
    for (const char *name : {"v_mul_u32_u24", "v_mad_u32_u24", "v_mul_hi_u32_u24",
                             "v_mul_i32_i24"}) {
        auto t0 = std::chrono::steady_clock::now();
        MnemonicParts parts = decompose_mnemonic(name);
        std::string back = compose_mnemonic(parts);
        worst = std::max(worst, ms_since(t0));
        ++count;
        if (back != name) {
            c.fail(std::string(name) + " came back as " + back);
            return c;
        }
        if (parts.suffixes.size() != 2 || parts.suffixes[1].bits != 24) {
            c.fail(std::string(name) + " lost the narrowing suffix");
            return c;
        }
    }

    if (worst > kMaxSuffixMillis)
        c.fail("slowest round trip took " + std::to_string(worst) + " ms");
    c.detail << count << " mnemonics, slowest " << worst << " ms";
    return c;
}

// 2. The fixed dispatch-descriptor offsets decode to their builtins: the
//    listing reads them with plain scalar loads, the output calls the
//    OpenCL query functions.
Check check_builtin_slots() {
    Check c;
    const CorpusKernel &ck = ocldec_tests::corpus_kernel("builtin_sizes");

    const char *loads[] = {
        "s_load_dwordx2 s[2:3], s[4:5], 0x0",
        "s_load_dword s9, s[4:5], 0xc",
        "s_load_dword s10, s[4:5], 0x10",
        "s_load_dword s11, s[4:5], 0x14",
        "s_load_dword s12, s[4:5], 0x20010",
    };
    for (const char *line : loads)
        if (ck.listing.find(line) == std::string::npos)
            c.fail(std::string("listing lost the probe line: ") + line);

    DecompileResult res = decompile_listing(ck.listing);
    if (res.kernels.size() != 1 || res.kernels[0].failed) {
        c.fail("decompilation failed");
        return c;
    }
    const std::string &src = res.kernels[0].source;
    const char *expected[] = {
        "get_global_offset(0)", "get_global_size(0)", "get_global_size(1)",
        "get_global_size(2)",   "get_work_dim()",
    };
    for (const char *call : expected)
        if (src.find(call) == std::string::npos)
            c.fail(std::string(call) + " missing from the output");
    if (res.kernels[0].body.fallback_count != 0)
        c.fail("unexpected fallback statements");
    return c;
}

// 3. The six-block reduction replay: three nested conditionals over one
//    shared exit merge innermost-first, the exit joining only the final
//    merge, in under 10 ms.
Check check_reduction_replay() {
    Check c;
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

    auto t0 = std::chrono::steady_clock::now();
    ReduceResult res = reduce(g);
    double elapsed = ms_since(t0);

    struct Expect {
        RegionKind kind;
        std::vector<int> absorbed;
        int result;
    };
    const Expect expected[] = {
        {RegionKind::IfThen, {4, 5}, 7},
        {RegionKind::Linear, {3, 7}, 8},
        {RegionKind::IfThen, {2, 8}, 9},
        {RegionKind::IfThen, {1, 9, 6}, 10},
    };

    if (!res.reduced)
        c.fail("graph did not reduce");
    if (res.merges.size() != 4) {
        c.fail("expected 4 merges, saw " + std::to_string(res.merges.size()));
        return c;
    }
    for (size_t i = 0; i < 4; ++i) {
        const MergeRecord &m = res.merges[i];
        const Expect &e = expected[i];
        if (m.kind != e.kind || m.absorbed != e.absorbed || m.result != e.result) {
            std::ostringstream os;
            os << "merge " << i << " diverged: {";
            for (int id : m.absorbed)
                os << id << ' ';
            os << "} -> " << m.result;
            c.fail(os.str());
        }
    }
    if (res.root && !res.root->join_absorbed)
        c.fail("final merge did not absorb the exit block");
    if (elapsed > kMaxReplayMillis)
        c.fail("replay took " + std::to_string(elapsed) + " ms");
    c.detail << "4 merges in " << elapsed << " ms";
    return c;
}

// 4. A thousand generated conditional nests (depth up to 6, all seven
//    branch styles) decompile to structured bodies whose shape matches the
//    generator's, inside 30 seconds.
Check check_nest_sweep() {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    unsigned styles_seen = 0;
    int shape_matches = 0;

    for (int seed = 1; seed <= kNestCount; ++seed) {
        NestSpec spec = ocldec_tests::make_nest(uint64_t(seed));
        styles_seen |= spec.styles_used;

        DecompileResult res = decompile_listing(spec.listing);
        if (res.kernels.size() != 1 || res.kernels[0].failed) {
            c.fail("seed " + std::to_string(seed) + " failed to decompile");
            continue;
        }
        const DecompiledKernel &k = res.kernels[0];
        if (!k.structured) {
            c.fail("seed " + std::to_string(seed) + " left goto residue");
            continue;
        }
        if (!ocldec_tests::skel_equal(ocldec_tests::skeleton_of(k.reduction.root), spec.shape)) {
            c.fail("seed " + std::to_string(seed) + " recovered a different shape");
            continue;
        }
        ++shape_matches;
    }

    double seconds = ms_since(t0) / 1000.0;
    if (!(styles_seen & ocldec_tests::kStyleMaskForm2))
        c.fail("generator never used the else-in-inversion layout");
    if (!(styles_seen & ocldec_tests::kStyleMaskForm3))
        c.fail("generator never used the fall-through-header layout");
    if (seconds > kMaxNestSeconds)
        c.fail("sweep took " + std::to_string(seconds) + " s");
    c.detail << shape_matches << "/" << kNestCount << " isomorphic in " << seconds << " s";
    return c;
}

// 5. Differential execution: for every corpus kernel inside the supported
//    subset, the machine-level interpreter and the evaluator of the
//    decompiled body produce identical write traces across 100 sampled
//    environments each.
Check check_differential() {
    Check c;
    size_t kernels = 0, runs = 0, mismatches = 0;

    for (const CorpusKernel &ck : ocldec_tests::corpus()) {
        if (!ck.comparable)
            continue;
        DecompileResult res = decompile_listing(ck.listing);
        if (res.kernels.size() != 1 || res.kernels[0].failed) {
            c.fail(ck.name + " failed to decompile");
            continue;
        }
        const DecompiledKernel &k = res.kernels[0];
        ++kernels;

        std::vector<OracleEnv> envs =
            ocldec_tests::sample_envs(k.config, kEnvsPerKernel, fnv1a(ck.name));
        for (size_t i = 0; i < envs.size(); ++i) {
            WriteTrace want, got;
            try {
                want = interpret_asm(k.instructions, k.config, k.abi, envs[i]);
                got = evaluate_decompiled(k.body, k.config, envs[i]);
            } catch (const OracleUnsupported &e) {
                c.fail(ck.name + " env " + std::to_string(i) + " not comparable: " + e.what());
                continue;
            }
            ++runs;
            if (want != got) {
                ++mismatches;
                if (c.ok)
                    c.fail(ck.name + " env " + std::to_string(i) + " diverged");
            }
        }
    }

    if (kernels < kMinComparableKernels)
        c.fail("only " + std::to_string(kernels) + " kernels were comparable");
    if (mismatches > 0)
        c.fail(std::to_string(mismatches) + " trace mismatches");
    c.detail << kernels << " kernels x " << kEnvsPerKernel << " environments, " << runs
             << " trace pairs equal";
    return c;
}

// 6. Output well-formedness: every corpus kernel's output parses under the
//    bundled grammar, and an unsupported instruction's text survives into
//    the inline-assembly statement byte for byte.
Check check_grammar_and_fallback() {
    Check c;
    for (const CorpusKernel &ck : ocldec_tests::corpus()) {
        DecompileResult res = decompile_listing(ck.listing);
        if (res.kernels.size() != 1 || res.kernels[0].failed) {
            c.fail(ck.name + " failed to decompile");
            continue;
        }
        ocldec_tests::GrammarResult g = ocldec_tests::check_opencl_source(res.kernels[0].source);
        if (!g.ok)
            c.fail(ck.name + ": " + g.error);
        if (res.kernels[0].body.fallback_count != ck.expected_fallbacks)
            c.fail(ck.name + " fallback count " +
                   std::to_string(res.kernels[0].body.fallback_count) + ", expected " +
                   std::to_string(ck.expected_fallbacks));
    }

    DecompileResult fb = decompile_listing(ocldec_tests::corpus_kernel("fallback_ds").listing);
    if (fb.kernels.empty() ||
        fb.kernels[0].source.find("__asm volatile (\"ds_read_b32 v2, v1\");") ==
            std::string::npos)
        c.fail("raw statement payload was altered");
    return c;
}

// 7. Determinism: decompiling the same input twice gives byte-identical
//    output, kernels and diagnostics alike.
Check check_determinism() {
    Check c;
    auto run_all = [] {
        std::string out;
        for (const CorpusKernel &ck : ocldec_tests::corpus()) {
            DecompileResult res = decompile_listing(ck.listing);
            out += res.combined_source();
            for (const Diagnostic &d : res.diagnostics.all())
                out += d.render("in");
        }
        for (int seed = 1; seed <= 50; ++seed)
            out += decompile_listing(ocldec_tests::make_nest(uint64_t(seed)).listing)
                       .combined_source();
        return out;
    };
    std::string first = run_all();
    std::string second = run_all();
    if (first != second)
        c.fail("two runs differ");
    c.detail << first.size() << " bytes reproduced";
    return c;
}

// 8. The reference kernel: exact signature, and the one store indexes the
//    pointer argument by global id minus global offset.
Check check_reference_kernel() {
    Check c;
    DecompileResult res = decompile_listing(ocldec_tests::corpus_kernel("copy").listing);
    if (res.kernels.size() != 1 || res.kernels[0].failed) {
        c.fail("decompilation failed");
        return c;
    }
    const std::string golden = "__kernel void copy(__global int *data, int x) {\n"
                               "    data[get_global_id(0) - get_global_offset(0)] = x;\n"
                               "}\n";
    if (res.kernels[0].source != golden) {
        c.fail("output differs from the reference:\n" + res.kernels[0].source);
    }
    return c;
}

} // namespace

int main() {
    struct Entry {
        const char *title;
        Check (*fn)();
    };
    const Entry entries[] = {
        {"typed mnemonics round-trip within 1 ms each", check_suffix_grid},
        {"dispatch-descriptor slots decode to builtin calls", check_builtin_slots},
        {"six-block reduction replays the expected merges in 10 ms", check_reduction_replay},
        {"1000 generated nests recover their shape in 30 s", check_nest_sweep},
        {"interpreter and decompiled bodies trace identically", check_differential},
        {"all outputs parse; raw statements keep their text", check_grammar_and_fallback},
        {"repeated runs are byte-identical", check_determinism},
        {"reference kernel matches its known source", check_reference_kernel},
    };

    int failures = 0;
    int index = 0;
    for (const Entry &e : entries) {
        ++index;
        Check c = e.fn();
        std::cout << (c.ok ? "[PASS] " : "[FAIL] ") << index << ". " << e.title;
        std::string detail = c.detail.str();
        if (!detail.empty())
            std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!c.ok)
            ++failures;
    }

    if (failures > 0)
        std::cout << failures << " of 8 checks failed\n";
    return failures == 0 ? 0 : 1;
}
