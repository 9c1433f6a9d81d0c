// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/abi_model.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace ocldec {

const AbiEntry *AbiMap::find(uint32_t offset, unsigned dwords) const {
    for (const AbiEntry &e : entries_) {
        if (e.offset == offset && e.dwords == dwords)
            return &e;
    }
    return nullptr;
}

const AbiEntry *AbiMap::find_dword(uint32_t offset, bool *second_half) const {
    // The fixed slots overlap: the 64-bit global-offset slots interleave
    // with the 32-bit global-size slots. For a single dword the 32-bit
    // entry is the one the compiler meant, so resolve narrow-first and
    // treat high halves of 64-bit slots as the last resort.
    if (second_half)
        *second_half = false;
    for (const AbiEntry &e : entries_)
        if (e.offset == offset && e.dwords == 1)
            return &e;
    for (const AbiEntry &e : entries_)
        if (e.offset == offset && e.dwords == 2)
            return &e;
    for (const AbiEntry &e : entries_) {
        if (e.dwords == 2 && e.offset + 4 == offset) {
            if (second_half)
                *second_half = true;
            return &e;
        }
    }
    return nullptr;
}

void AbiMap::add(AbiEntry entry) {
    // Later additions win on exact (offset, width) collision; that is what
    // lets override files replace the fixed slots.
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [&](const AbiEntry &e) {
                                      return e.offset == entry.offset && e.dwords == entry.dwords;
                                  }),
                   entries_.end());
    entries_.push_back(std::move(entry));
}

namespace {

std::optional<uint32_t> parse_u32(std::string_view s) {
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        base = 16;
        s.remove_prefix(2);
    }
    uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// The fixed settings-area slots. Offsets overlap on purpose: the 64-bit
// view of 0x10 is the z global offset while the 32-bit view is the y
// global size, and the load width picks the right one.
struct FixedSlot {
    uint32_t offset;
    uint8_t dwords;
    BuiltinFn fn;
    int dim;
};

constexpr FixedSlot kFixedSlots[] = {
    {0x0, 2, BuiltinFn::GlobalOffset, 0},
    {0x8, 2, BuiltinFn::GlobalOffset, 1},
    {0x10, 2, BuiltinFn::GlobalOffset, 2},
    {0xc, 1, BuiltinFn::GlobalSize, 0},
    {0x10, 1, BuiltinFn::GlobalSize, 1},
    {0x14, 1, BuiltinFn::GlobalSize, 2},
    {0x20010, 1, BuiltinFn::WorkDim, 0},
};

DataType builtin_value_type(BuiltinFn fn) {
    // Offsets are loaded as 64-bit values; the sizes and work_dim are
    // 32-bit. (get_global_offset returns size_t in OpenCL C.)
    return fn == BuiltinFn::GlobalOffset ? DataType::unsigned_int(64)
                                         : DataType::unsigned_int(32);
}

} // namespace

std::vector<AbiOverride> parse_abi_overrides(const std::string &text, DiagnosticSink &sink) {
    std::vector<AbiOverride> overrides;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim_view(raw);
        if (line.empty() || line[0] == '#')
            continue;
        size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            sink.error(line_no, "override line is not key=value");
            continue;
        }
        std::string_view key = trim_view(line.substr(0, eq));
        std::string_view value = trim_view(line.substr(eq + 1));

        AbiOverride ov;
        size_t colon = key.find(':');
        std::string_view off_text = colon == std::string_view::npos ? key : key.substr(0, colon);
        auto offset = parse_u32(trim_view(off_text));
        if (!offset) {
            sink.error(line_no, "bad offset in override key");
            continue;
        }
        ov.offset = *offset;
        ov.dwords = 1;
        if (colon != std::string_view::npos) {
            auto width = parse_u32(trim_view(key.substr(colon + 1)));
            if (!width || (*width != 1 && *width != 2)) {
                sink.error(line_no, "override width must be 1 or 2 dwords");
                continue;
            }
            ov.dwords = uint8_t(*width);
        }
        if (value.empty()) {
            sink.error(line_no, "override has an empty target");
            continue;
        }
        ov.target = std::string(value);
        overrides.push_back(std::move(ov));
    }
    return overrides;
}

AbiMap build_abi_map(const KernelConfig &config, DiagnosticSink &sink,
                     const std::vector<AbiOverride> &overrides) {
    AbiMap map;

    if (config.useargs) {
        for (const FixedSlot &slot : kFixedSlots) {
            AbiEntry e;
            e.offset = slot.offset;
            e.dwords = slot.dwords;
            e.builtin = BuiltinId{slot.fn, slot.dim};
            e.type = builtin_value_type(slot.fn);
            map.add(e);
        }
    }

    // Arguments (implicit block first, as declared) are packed sequentially
    // and aligned to their own size: pointers and longs to 8, everything
    // else to 4.
    uint32_t offset = 0;
    for (size_t i = 0; i < config.args.size(); ++i) {
        const ArgDecl &arg = config.args[i];
        uint32_t size = std::max(4u, arg.type.byte_size());
        offset = (offset + size - 1) & ~(size - 1);

        AbiEntry e;
        e.offset = offset;
        e.dwords = uint8_t(std::max(1u, size / 4));
        e.arg_index = int(i);
        e.type = arg.type;
        // The implicit global-offset args double as builtin slots; keep the
        // builtin id on them so a by-name override can restore it.
        if (arg.is_implicit && arg.name.rfind("_.global_offset_", 0) == 0 &&
            arg.name.size() == 17 && arg.name.back() >= '0' && arg.name.back() <= '2')
            e.builtin = BuiltinId{BuiltinFn::GlobalOffset, arg.name.back() - '0'};
        if (e.dwords <= 2)
            map.add(e);
        // else: by-value structs wider than 8 bytes have no single-load
        // representation; loads inside them stay symbolic.
        offset += size;
    }

    for (const AbiOverride &ov : overrides) {
        AbiEntry e;
        e.offset = ov.offset;
        e.dwords = ov.dwords;
        std::string_view target = ov.target;
        size_t colon = target.find(':');
        std::string_view head = colon == std::string_view::npos ? target : target.substr(0, colon);
        std::string_view tail = colon == std::string_view::npos ? "" : target.substr(colon + 1);

        if (head == "arg") {
            auto it = std::find_if(config.args.begin(), config.args.end(),
                                   [&](const ArgDecl &a) { return a.name == tail; });
            if (it == config.args.end()) {
                sink.error(0, "override names unknown argument '" + std::string(tail) + "'");
                continue;
            }
            e.arg_index = int(it - config.args.begin());
            e.type = it->type;
        } else {
            BuiltinFn fn;
            if (head == "global_offset")
                fn = BuiltinFn::GlobalOffset;
            else if (head == "global_size")
                fn = BuiltinFn::GlobalSize;
            else if (head == "work_dim")
                fn = BuiltinFn::WorkDim;
            else if (head == "local_size")
                fn = BuiltinFn::LocalSize;
            else if (head == "num_groups")
                fn = BuiltinFn::NumGroups;
            else {
                sink.error(0, "unknown override target '" + ov.target + "'");
                continue;
            }
            int dim = 0;
            if (!tail.empty()) {
                auto d = parse_u32(tail);
                if (!d || *d > 2) {
                    sink.error(0, "override dimension must be 0..2");
                    continue;
                }
                dim = int(*d);
            }
            e.builtin = BuiltinId{fn, dim};
            e.type = builtin_value_type(fn);
        }
        map.add(e);
    }
    return map;
}

uint32_t local_size(const KernelConfig &config, int dim) {
    if (dim < 0 || dim > 2)
        return 1;
    return config.cws[size_t(dim)];
}

RegisterFile initial_register_state(const KernelConfig &config) {
    RegisterFile regs;

    // s[4:5]: flat 64-bit pointer to the settings/kernarg area.
    ExprPtr base = Expr::kernarg_base();
    auto &lo = regs.sgpr(kSettingsBaseSgpr);
    auto &hi = regs.sgpr(kSettingsBaseSgpr + 1);
    lo.expr = base;
    lo.integrity = Integrity::LowPart;
    lo.type = base->type;
    hi.expr = base;
    hi.integrity = Integrity::HighPart;
    hi.type = base->type;

    const DataType id_type = DataType::unsigned_int(32);
    for (int d = 0; d < config.dims; ++d) {
        auto &v = regs.vgpr(unsigned(d));
        v.expr = Expr::builtin_ref({BuiltinFn::LocalId, d}, id_type);
        v.type = id_type;
        auto &s = regs.sgpr(6 + unsigned(d));
        s.expr = Expr::builtin_ref({BuiltinFn::GroupId, d}, id_type);
        s.type = id_type;
    }

    // All lanes are live on entry.
    regs.exec().expr = Expr::c64(~uint64_t(0));
    regs.exec().type = DataType::binary(64);
    return regs;
}

} // namespace ocldec
