// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/decompiler.hpp"

#include <set>
#include <utility>

namespace ocldec {

namespace {

// A listing may end on a label (a branch target past the last
// instruction). The flow graph wants every label on an instruction, so the
// kernel gets an explicit final s_endpgm to carry them; executing it there
// is exactly what the hardware would do anyway.
void attach_trailing_labels(std::vector<Instruction> &instructions,
                            std::vector<std::string> trailing, int line) {
    if (trailing.empty())
        return;
    Instruction end;
    end.line = line;
    end.labels = std::move(trailing);
    end.source_text = "s_endpgm";
    end.mnemonic = "s_endpgm";
    end.parts = decompose_mnemonic(end.mnemonic);
    instructions.push_back(std::move(end));
}

// Declarations for the variables the symbolic stepper invented for reads
// of registers with no known value. They go in front of the body, zero
// values, one per distinct name (the same register read in two scopes
// records its name twice).
void hoist_fresh_decls(const std::vector<std::pair<std::string, DataType>> &fresh,
                       LoweredBody &body) {
    std::set<std::string> seen;
    std::vector<Stmt> decls;
    for (const auto &[name, type] : fresh) {
        if (!seen.insert(name).second)
            continue;
        Stmt s;
        s.kind = StmtKind::Basic;
        s.base.kind = StatementKind::Decl;
        s.base.name = name;
        s.base.decl_type = type;
        decls.push_back(std::move(s));
    }
    body.stmts.insert(body.stmts.begin(), std::make_move_iterator(decls.begin()),
                      std::make_move_iterator(decls.end()));
}

DecompiledKernel decompile_section(const KernelSection &section, const DecompileOptions &opts,
                                   DiagnosticSink &sink) {
    DecompiledKernel k;
    k.name = section.name;
    try {
        k.config = parse_config(section, sink);

        std::vector<std::string> trailing;
        k.instructions = parse_text(section, sink, &trailing);
        int end_line = k.instructions.empty() ? section.line : k.instructions.back().line;
        attach_trailing_labels(k.instructions, std::move(trailing), end_line);

        k.abi = build_abi_map(k.config, sink, opts.abi_overrides);

        k.cfg = build_cfg(k.instructions, sink);
        annotate_exec(k.cfg);
        normalize_if_else(k.cfg, sink);
        if (opts.dump_cfg)
            k.cfg_dot = to_dot(k.cfg, k.name);

        k.regions = std::make_unique<RegionGraph>(RegionGraph::from_cfg(k.cfg));
        ReduceOptions ropts;
        ropts.record_dumps = opts.dump_regions;
        k.reduction = reduce(*k.regions, ropts);
        k.structured = k.reduction.reduced;

        std::vector<std::pair<std::string, DataType>> fresh_vars;
        std::set<std::string> name_pool;
        StepContext ctx;
        ctx.config = &k.config;
        ctx.abi = &k.abi;
        ctx.sink = &sink;
        ctx.folds = opts.folds;
        ctx.fresh_vars = &fresh_vars;
        ctx.name_pool = &name_pool;

        k.body = lower_kernel(k.cfg, k.reduction, ctx);
        hoist_fresh_decls(fresh_vars, k.body);

        k.source = emit_kernel(k.config, k.body);
    } catch (const ParseError &e) {
        sink.error(e.line(), e.what());
        k.failed = true;
        k.source.clear();
    }
    return k;
}

} // namespace

std::string DecompileResult::combined_source() const {
    std::string out;
    for (const DecompiledKernel &k : kernels) {
        if (k.source.empty())
            continue;
        if (!out.empty())
            out += "\n";
        out += k.source;
    }
    return out;
}

DecompileResult decompile_listing(const std::string &listing, const DecompileOptions &opts) {
    DecompileResult result;
    std::vector<KernelSection> sections;
    try {
        sections = split_kernels(listing);
    } catch (const ParseError &e) {
        result.diagnostics.error(e.line(), e.what());
        return result;
    }

    for (const KernelSection &section : sections) {
        if (opts.only_kernel && section.name != *opts.only_kernel)
            continue;
        result.kernels.push_back(decompile_section(section, opts, result.diagnostics));
    }
    return result;
}

} // namespace ocldec
