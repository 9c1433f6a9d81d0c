// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
// Pipeline front door: listing text in, OpenCL C out, with every
// intermediate stage kept around for inspection and testing.

#ifndef OCLDEC_DECOMPILER_HPP
#define OCLDEC_DECOMPILER_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ocldec/abi_model.hpp"
#include "ocldec/asm_frontend.hpp"
#include "ocldec/cfg.hpp"
#include "ocldec/codegen.hpp"
#include "ocldec/lower.hpp"
#include "ocldec/oracle.hpp"
#include "ocldec/structurizer.hpp"
#include "ocldec/sym_state.hpp"

namespace ocldec {

struct DecompileOptions {
    FoldOptions folds;
    std::vector<AbiOverride> abi_overrides;
    std::optional<std::string> only_kernel; // restrict to one kernel by name
    bool dump_cfg = false;     // collect DOT for the flow graph
    bool dump_regions = false; // collect DOT per reduction step
};

// Everything produced for one kernel. The region graph owns the region
// tree, so the struct is move-only and pointer-stable.
struct DecompiledKernel {
    std::string name;
    KernelConfig config;
    std::vector<Instruction> instructions;
    AbiMap abi;
    Cfg cfg;
    std::unique_ptr<RegionGraph> regions;
    ReduceResult reduction;
    LoweredBody body;
    std::string source;    // the emitted OpenCL C
    std::string cfg_dot;   // when dump_cfg
    bool structured = false; // false: goto residue was needed
    bool failed = false;     // hard error; source is empty
};

struct DecompileResult {
    std::vector<DecompiledKernel> kernels;
    DiagnosticSink diagnostics;

    // All kernel sources concatenated in listing order.
    std::string combined_source() const;
};

DecompileResult decompile_listing(const std::string &listing, const DecompileOptions &opts = {});

} // namespace ocldec

#endif
