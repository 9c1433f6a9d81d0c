// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
// Differential testing backend: a single-lane interpreter for the
// assembly listing and a structural evaluator for the decompiled body.
// Both produce an ordered (address, value) write trace; equality of the
// traces is the correctness criterion.

#ifndef OCLDEC_ORACLE_HPP
#define OCLDEC_ORACLE_HPP

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocldec/abi_model.hpp"
#include "ocldec/asm_frontend.hpp"
#include "ocldec/cfg.hpp"
#include "ocldec/lower.hpp"

namespace ocldec {

// One sampled execution environment: the NDRange coordinates of a single
// work item plus argument values. Pointer arguments get distinct aligned
// fake base addresses; memory reads are a deterministic hash of the
// address, so both sides observe identical loads without a real buffer.
struct OracleEnv {
    int dims = 1;
    std::array<uint32_t, 3> cws = {1, 1, 1};
    std::array<uint32_t, 3> num_groups = {1, 1, 1};
    std::array<uint32_t, 3> group_id = {0, 0, 0};
    std::array<uint32_t, 3> local_id = {0, 0, 0};
    std::array<uint64_t, 3> global_offset = {0, 0, 0};
    std::map<std::string, uint64_t> arg_values; // scalars by value, pointers by base
    uint64_t mem_seed = 0x9e3779b97f4a7c15ull;

    uint32_t global_size(int d) const { return cws[size_t(d)] * num_groups[size_t(d)]; }
    uint64_t global_id(int d) const {
        return uint64_t(group_id[size_t(d)]) * cws[size_t(d)] + local_id[size_t(d)] +
               global_offset[size_t(d)];
    }
    // Pristine memory contents at an address (before this kernel's writes).
    uint32_t initial_memory(uint64_t addr) const;
};

struct TraceEntry {
    uint64_t addr = 0;
    uint32_t value = 0;
    bool operator==(const TraceEntry &) const = default;
};
using WriteTrace = std::vector<TraceEntry>;

// Raised when either side hits something it has no semantics for (an
// instruction outside the supported subset, raw assembly in the lowered
// body). The differential harness treats it as "not comparable", never as
// a pass or a fail.
class OracleUnsupported : public std::runtime_error {
public:
    explicit OracleUnsupported(const std::string &what) : std::runtime_error(what) {}
};

// Executes the instruction list as one work item of one wavefront lane:
// 32-bit machine registers, a real 64-bit exec mask (bit 0 gates vector
// and flat writes), branches taken by flag values. Fuel-limited to catch
// accidental loops.
WriteTrace interpret_asm(const std::vector<Instruction> &instructions,
                         const KernelConfig &config, const AbiMap &abi, const OracleEnv &env);

// Walks the lowered statement tree, evaluating expressions numerically
// with the same environment and memory model.
WriteTrace evaluate_decompiled(const LoweredBody &body, const KernelConfig &config,
                               const OracleEnv &env);

} // namespace ocldec

#endif
