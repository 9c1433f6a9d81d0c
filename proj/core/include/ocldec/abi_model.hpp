// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
// Calling-convention model for kernels built by the AMDGPU-Pro/Adrenaline
// OpenCL stack: which scalar loads off the settings base register pair
// yield work-item builtins, and at which offsets the kernel arguments live.

#ifndef OCLDEC_ABI_MODEL_HPP
#define OCLDEC_ABI_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ocldec/asm_frontend.hpp"
#include "ocldec/diagnostics.hpp"
#include "ocldec/expr.hpp"
#include "ocldec/registers.hpp"

namespace ocldec {

// The SGPR pair the driver points at the settings/kernarg area.
inline constexpr unsigned kSettingsBaseSgpr = 4; // s[4:5]

// What one (offset, width) scalar load from the settings base resolves to.
struct AbiEntry {
    uint32_t offset = 0;
    uint8_t dwords = 1; // 1 or 2
    std::optional<BuiltinId> builtin; // a work-item builtin value
    int arg_index = -1;               // or one of config.args
    DataType type;
};

class AbiMap {
public:
    // Exact (offset, width) lookup. Width participates in the match: the
    // 64-bit load at 0x10 is global_offset(2) while the 32-bit load at
    // 0x10 is global_size(1).
    const AbiEntry *find(uint32_t offset, unsigned dwords) const;

    // Per-dword lookup for wide loads (dwordx4): returns the entry
    // covering this dword and sets *second_half when the dword is the
    // upper half of a 64-bit entry.
    const AbiEntry *find_dword(uint32_t offset, bool *second_half) const;

    const std::vector<AbiEntry> &entries() const { return entries_; }
    void add(AbiEntry entry);

private:
    std::vector<AbiEntry> entries_;
};

// A parsed override line: remaps one (offset, width) slot.
struct AbiOverride {
    uint32_t offset = 0;
    uint8_t dwords = 1;
    std::string target; // "global_offset:0", "global_size:2", "work_dim", "arg:x"
};

// Parses the override file format, one mapping per line:
//   0x18:2 = global_offset:0
//   0x20:1 = arg:scale
// '#' comments and blank lines are skipped.
std::vector<AbiOverride> parse_abi_overrides(const std::string &text, DiagnosticSink &sink);

// Builds the load-resolution table for one kernel: the fixed builtin slots
// (present when the config says the kernel takes the settings pointer),
// plus the declared arguments laid out sequentially with size alignment.
// Overrides are applied last and replace colliding entries.
AbiMap build_abi_map(const KernelConfig &config, DiagnosticSink &sink,
                     const std::vector<AbiOverride> &overrides = {});

// Work-group size for a dimension, from the config's cws directive.
uint32_t local_size(const KernelConfig &config, int dim);

// Register state at kernel entry: s[4:5] holds the settings base pointer,
// v0..v2 the local ids and s6..s8 the group ids for each active dimension.
RegisterFile initial_register_state(const KernelConfig &config);

} // namespace ocldec

#endif
