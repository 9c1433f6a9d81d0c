// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/oracle.hpp"

#include <cstring>

#include "ocldec/expr.hpp"

namespace ocldec {

namespace {

// Fake address the settings/kernarg pointer holds. High enough that test
// harness pointer arguments (picked in the 0x1xxx_xxxx_xxxx range) never
// collide with it.
constexpr uint64_t kSettingsBase = 0xf000000000000000ull;

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

float bits_to_float(uint32_t b) {
    float f;
    std::memcpy(&f, &b, sizeof f);
    return f;
}

uint32_t float_to_bits(float f) {
    uint32_t b;
    std::memcpy(&b, &f, sizeof b);
    return b;
}

// Shared memory model: a pristine hash overlaid by this run's writes.
struct Memory {
    const OracleEnv &env;
    std::map<uint64_t, uint32_t> overlay;
    WriteTrace trace;

    explicit Memory(const OracleEnv &e) : env(e) {}

    uint32_t load(uint64_t addr) const {
        auto it = overlay.find(addr);
        return it != overlay.end() ? it->second : env.initial_memory(addr);
    }
    void store(uint64_t addr, uint32_t value) {
        overlay[addr] = value;
        trace.push_back({addr, value});
    }
};

// Concrete value a settings-area slot holds for this environment.
uint64_t slot_value(const AbiEntry *e, const KernelConfig &config, const OracleEnv &env) {
    uint64_t value = 0;
    if (e->builtin) {
        switch (e->builtin->fn) {
        case BuiltinFn::GlobalOffset:
            value = env.global_offset[size_t(e->builtin->dim)];
            break;
        case BuiltinFn::GlobalSize:
            value = env.global_size(e->builtin->dim);
            break;
        case BuiltinFn::WorkDim:
            value = uint64_t(env.dims);
            break;
        case BuiltinFn::LocalSize:
            value = env.cws[size_t(e->builtin->dim)];
            break;
        case BuiltinFn::NumGroups:
            value = env.num_groups[size_t(e->builtin->dim)];
            break;
        default:
            value = 0;
            break;
        }
    } else if (e->arg_index >= 0 && e->arg_index < int(config.args.size())) {
        std::string name = config.args[size_t(e->arg_index)].name;
        for (char &c : name)
            if (c == '.')
                c = '_';
        auto it = env.arg_values.find(name);
        value = it != env.arg_values.end() ? it->second : 0;
    }
    return value;
}

// What one settings-area dword holds. Only a fallback: overlapping slots
// make single dwords ambiguous, so whole-slot loads resolve by width first.
uint32_t settings_dword(const AbiMap &abi, const KernelConfig &config, const OracleEnv &env,
                        uint32_t offset) {
    bool second = false;
    const AbiEntry *e = abi.find_dword(offset, &second);
    if (!e)
        return env.initial_memory(kSettingsBase + offset);
    uint64_t value = slot_value(e, config, env);
    return second ? uint32_t(value >> 32) : uint32_t(value);
}

struct Machine {
    const std::vector<Instruction> &ins;
    const KernelConfig &config;
    const AbiMap &abi;
    const OracleEnv &env;
    Memory mem;

    std::array<uint32_t, kSgprCount> s{};
    std::array<uint32_t, kVgprCount> v{};
    uint64_t exec = ~0ull;
    uint64_t vcc = 0;
    uint32_t scc = 0;
    uint32_t m0 = 0;
    std::map<std::string, size_t> label_at;
    size_t pc = 0;
    long fuel = 1 << 20;

    Machine(const std::vector<Instruction> &i, const KernelConfig &c, const AbiMap &a,
            const OracleEnv &e)
        : ins(i), config(c), abi(a), env(e), mem(e) {
        s[kSettingsBaseSgpr] = uint32_t(kSettingsBase);
        s[kSettingsBaseSgpr + 1] = uint32_t(kSettingsBase >> 32);
        for (int d = 0; d < config.dims; ++d) {
            v[size_t(d)] = env.local_id[size_t(d)];
            s[size_t(6 + d)] = env.group_id[size_t(d)];
        }
        for (size_t k = 0; k < ins.size(); ++k)
            for (const std::string &l : ins[k].labels)
                label_at[l] = k;
    }

    [[noreturn]] void unsupported(const Instruction &i, const std::string &why) const {
        throw OracleUnsupported("line " + std::to_string(i.line) + ": " + why);
    }

    bool lane_on() const { return (exec & 1) != 0; }

    uint64_t read64(const Operand &op) {
        switch (op.kind) {
        case OperandKind::SReg:
            return uint64_t(s.at(op.first)) | (uint64_t(s.at(op.first + 1)) << 32);
        case OperandKind::VReg:
            return uint64_t(v.at(op.first)) | (uint64_t(v.at(op.first + 1)) << 32);
        case OperandKind::Literal:
            return uint64_t(op.value);
        case OperandKind::Special:
            switch (op.special) {
            case SpecialReg::Exec: return exec;
            case SpecialReg::Vcc: return vcc;
            default: break;
            }
            break;
        default:
            break;
        }
        throw OracleUnsupported("unreadable 64-bit operand " + op.text);
    }

    uint32_t read32(const Operand &op) {
        switch (op.kind) {
        case OperandKind::SReg: return s.at(op.first);
        case OperandKind::VReg: return v.at(op.first);
        case OperandKind::Literal: return uint32_t(op.value);
        case OperandKind::Special:
            switch (op.special) {
            case SpecialReg::ExecLo: return uint32_t(exec);
            case SpecialReg::ExecHi: return uint32_t(exec >> 32);
            case SpecialReg::VccLo: return uint32_t(vcc);
            case SpecialReg::VccHi: return uint32_t(vcc >> 32);
            case SpecialReg::Scc: return scc;
            case SpecialReg::M0: return m0;
            default: break;
            }
            break;
        default:
            break;
        }
        throw OracleUnsupported("unreadable operand " + op.text);
    }

    void write_sdst32(const Operand &op, uint32_t value) {
        if (op.kind == OperandKind::SReg) {
            s.at(op.first) = value;
        } else if (op.kind == OperandKind::Special && op.special == SpecialReg::M0) {
            m0 = value;
        } else {
            throw OracleUnsupported("unwritable scalar destination " + op.text);
        }
    }

    void write_sdst64(const Operand &op, uint64_t value) {
        switch (op.kind) {
        case OperandKind::SReg:
            s.at(op.first) = uint32_t(value);
            s.at(op.first + 1) = uint32_t(value >> 32);
            return;
        case OperandKind::Special:
            if (op.special == SpecialReg::Exec) {
                exec = value;
                return;
            }
            if (op.special == SpecialReg::Vcc) {
                vcc = value;
                return;
            }
            break;
        default:
            break;
        }
        throw OracleUnsupported("unwritable 64-bit destination " + op.text);
    }

    // Lane-0 writes honor the exec mask.
    void write_vdst(const Operand &op, uint32_t value) {
        if (op.kind != OperandKind::VReg)
            throw OracleUnsupported("unwritable vector destination " + op.text);
        if (lane_on())
            v.at(op.first) = value;
    }

    uint32_t load_dword(uint64_t addr) {
        if (addr >= kSettingsBase && addr < kSettingsBase + (1ull << 20))
            return settings_dword(abi, config, env, uint32_t(addr - kSettingsBase));
        return mem.load(addr);
    }

    void run() {
        while (pc < ins.size()) {
            if (--fuel < 0)
                throw OracleUnsupported("fuel exhausted (runaway loop?)");
            const Instruction &i = ins[pc];
            if (i.parse_failed)
                unsupported(i, "unparsed instruction");
            size_t next = pc + 1;
            if (!step(i, next))
                return; // s_endpgm
            pc = next;
        }
    }

    size_t target(const Instruction &i) {
        if (i.operands.empty() || i.operands[0].kind != OperandKind::Symbol)
            unsupported(i, "branch without label");
        auto it = label_at.find(i.operands[0].text);
        if (it == label_at.end())
            unsupported(i, "unknown label " + i.operands[0].text);
        return it->second;
    }

    // Returns false on s_endpgm.
    bool step(const Instruction &i, size_t &next) {
        const std::string &p = i.parts.prefix;
        if (p == "s")
            return scalar(i, next);
        if (p == "v") {
            vector(i);
            return true;
        }
        if (p == "flat") {
            flat(i);
            return true;
        }
        unsupported(i, "instruction outside the interpreted subset: " + i.mnemonic);
    }

    DataType stype(const Instruction &i, DataType dflt) const {
        if (!i.parts.suffixes.empty())
            return type_from_suffix(i.parts.suffixes[0]);
        return dflt;
    }

    // v_mul_u32_u24 and friends mask their sources to 24 bits; the signed
    // forms sign-extend instead and stay outside the subset.
    bool mul24_operands(const Instruction &i) {
        for (const TypeSuffix &s : i.parts.suffixes) {
            if (s.bits != 24)
                continue;
            if (s.base == 'i')
                unsupported(i, "signed 24-bit multiply");
            return true;
        }
        return false;
    }

    bool scalar(const Instruction &i, size_t &next) {
        const std::string &root = i.parts.root;
        const auto &ops = i.operands;

        if (root == "endpgm")
            return false;
        if (root == "waitcnt" || root == "nop" || root == "barrier")
            return true;
        if (root == "branch") {
            next = target(i);
            return true;
        }
        if (root.rfind("cbranch_", 0) == 0) {
            bool taken = false;
            if (root == "cbranch_scc0") taken = scc == 0;
            else if (root == "cbranch_scc1") taken = scc != 0;
            else if (root == "cbranch_vccz") taken = vcc == 0;
            else if (root == "cbranch_vccnz") taken = vcc != 0;
            else if (root == "cbranch_execz") taken = exec == 0;
            else if (root == "cbranch_execnz") taken = exec != 0;
            else unsupported(i, "conditional branch " + root);
            if (taken)
                next = target(i);
            return true;
        }

        if (root == "load_dword" || root == "load_dwordx2" || root == "load_dwordx4") {
            unsigned dwords = root == "load_dword" ? 1 : (root == "load_dwordx2" ? 2 : 4);
            if (ops.size() < 2 || !ops[0].is_sreg())
                unsupported(i, "scalar load operands");
            uint64_t base = read64(ops[1]);
            uint64_t off = ops.size() >= 3 && ops[2].is_literal() ? uint64_t(ops[2].value) : 0;
            uint64_t addr = base + off;
            // Inside the settings window the load width picks the slot, the
            // same way the decompiler resolves it; the interleaved offset
            // and size slots are ambiguous one dword at a time.
            if (addr >= kSettingsBase && addr < kSettingsBase + (1ull << 20) && dwords <= 2) {
                if (const AbiEntry *e = abi.find(uint32_t(addr - kSettingsBase), dwords)) {
                    uint64_t value = slot_value(e, config, env);
                    s.at(ops[0].first) = uint32_t(value);
                    if (dwords == 2)
                        s.at(ops[0].first + 1) = uint32_t(value >> 32);
                    return true;
                }
            }
            for (unsigned k = 0; k < dwords; ++k)
                s.at(ops[0].first + k) = load_dword(addr + 4 * k);
            return true;
        }

        DataType t = stype(i, DataType::binary(32));
        const bool wide = t.bits == 64;

        if (root == "mov" && ops.size() >= 2) {
            if (wide)
                write_sdst64(ops[0], read64(ops[1]));
            else
                write_sdst32(ops[0], read32(ops[1]));
            return true;
        }
        if ((root == "add" || root == "sub") && ops.size() >= 3) {
            uint64_t a = read32(ops[1]), b = read32(ops[2]);
            uint64_t r = root == "add" ? a + b : a - b;
            write_sdst32(ops[0], uint32_t(r));
            if (t.is_signed()) {
                int64_t sr = root == "add" ? int64_t(int32_t(a)) + int32_t(b)
                                           : int64_t(int32_t(a)) - int32_t(b);
                scc = sr != int64_t(int32_t(uint32_t(sr))) ? 1 : 0;
            } else {
                scc = (r >> 32) & 1;
            }
            return true;
        }
        if ((root == "addk" || root == "mulk") && ops.size() >= 2) {
            uint32_t a = read32(ops[0]);
            uint32_t b = read32(ops[1]);
            uint32_t r = root == "addk" ? a + b : a * b;
            write_sdst32(ops[0], r);
            if (root == "addk")
                scc = (uint64_t(a) + b) >> 32 ? 1 : 0;
            return true;
        }
        if (root == "mul" && ops.size() >= 3) {
            write_sdst32(ops[0], read32(ops[1]) * read32(ops[2]));
            return true;
        }
        if ((root == "and" || root == "or" || root == "xor" || root == "andn2") &&
            ops.size() >= 3) {
            uint64_t a = wide ? read64(ops[1]) : read32(ops[1]);
            uint64_t b = wide ? read64(ops[2]) : read32(ops[2]);
            uint64_t r = root == "and" ? (a & b)
                         : root == "or" ? (a | b)
                         : root == "xor" ? (a ^ b)
                                         : (a & ~b);
            if (wide)
                write_sdst64(ops[0], r);
            else
                write_sdst32(ops[0], uint32_t(r));
            scc = r != 0;
            return true;
        }
        if ((root == "lshl" || root == "lshr" || root == "ashr") && ops.size() >= 3) {
            uint64_t a = wide ? read64(ops[1]) : read32(ops[1]);
            uint32_t sh = read32(ops[2]) & (wide ? 63 : 31);
            uint64_t r;
            if (root == "lshl")
                r = a << sh;
            else if (root == "lshr")
                r = a >> sh;
            else
                r = wide ? uint64_t(int64_t(a) >> sh) : uint64_t(uint32_t(int32_t(a) >> sh));
            if (wide)
                write_sdst64(ops[0], r);
            else
                write_sdst32(ops[0], uint32_t(r));
            scc = r != 0;
            return true;
        }
        if (root == "and_saveexec" && ops.size() >= 2) {
            uint64_t old = exec;
            write_sdst64(ops[0], old);
            exec = old & read64(ops[1]);
            scc = exec != 0;
            return true;
        }
        if (root.rfind("cmp_", 0) == 0 && ops.size() >= 2) {
            scc = compare(root.substr(4), t, read32(ops[0]), read32(ops[1])) ? 1 : 0;
            return true;
        }

        unsupported(i, "scalar instruction " + i.mnemonic);
    }

    bool compare(const std::string &op, DataType t, uint32_t a, uint32_t b) const {
        if (t.is_float()) {
            float x = bits_to_float(a), y = bits_to_float(b);
            if (op == "eq") return x == y;
            if (op == "ne" || op == "lg" || op == "neq") return x != y;
            if (op == "lt") return x < y;
            if (op == "le") return x <= y;
            if (op == "gt") return x > y;
            if (op == "ge") return x >= y;
        } else if (t.base == BaseType::UnsignedInt || t.base == BaseType::Binary) {
            if (op == "eq") return a == b;
            if (op == "ne" || op == "lg") return a != b;
            if (op == "lt") return a < b;
            if (op == "le") return a <= b;
            if (op == "gt") return a > b;
            if (op == "ge") return a >= b;
        } else {
            int32_t x = int32_t(a), y = int32_t(b);
            if (op == "eq") return x == y;
            if (op == "ne" || op == "lg") return x != y;
            if (op == "lt") return x < y;
            if (op == "le") return x <= y;
            if (op == "gt") return x > y;
            if (op == "ge") return x >= y;
        }
        throw OracleUnsupported("comparison " + op);
    }

    void vector(const Instruction &i) {
        const std::string &root = i.parts.root;
        const auto &ops = i.operands;
        DataType t = stype(i, DataType::unsigned_int(32));

        if (root == "mov" && ops.size() >= 2) {
            write_vdst(ops[0], read32(ops[1]));
            return;
        }
        if (root == "cndmask" && ops.size() >= 4) {
            uint64_t cc = read64(ops[3]);
            write_vdst(ops[0], (cc & 1) ? read32(ops[2]) : read32(ops[1]));
            return;
        }
        if ((root == "add" || root == "sub" || root == "subrev") && ops.size() >= 3) {
            size_t src0 = 1;
            const Operand *carry = nullptr;
            if (ops[1].is_special(SpecialReg::Vcc) || (ops[1].is_sreg() && ops[1].count == 2)) {
                src0 = 2;
                carry = &ops[1];
            }
            if (ops.size() < src0 + 2)
                unsupported(i, "v_add operands");
            uint64_t a = read32(ops[src0]), b = read32(ops[src0 + 1]);
            if (root == "subrev")
                std::swap(a, b);
            if (t.is_float()) {
                if (t.bits != 32 || carry)
                    unsupported(i, "float add form");
                float r = root == "add" ? bits_to_float(uint32_t(a)) + bits_to_float(uint32_t(b))
                                        : bits_to_float(uint32_t(a)) - bits_to_float(uint32_t(b));
                write_vdst(ops[0], float_to_bits(r));
                return;
            }
            uint64_t r = root == "add" ? a + b : a - b;
            write_vdst(ops[0], uint32_t(r));
            if (carry) {
                uint64_t bit = root == "add" ? (r >> 32) & 1 : (a < b ? 1 : 0);
                write_carry(*carry, bit);
            }
            return;
        }
        if (root == "addc" && ops.size() >= 5) {
            uint64_t cin = read64(ops[4]) & 1;
            uint64_t r = uint64_t(read32(ops[2])) + read32(ops[3]) + cin;
            write_vdst(ops[0], uint32_t(r));
            write_carry(ops[1], (r >> 32) & 1);
            return;
        }
        if ((root == "mul" || root == "mul_lo" || root == "mul_hi") && ops.size() >= 3) {
            uint64_t a = read32(ops[1]), b = read32(ops[2]);
            if (mul24_operands(i)) { // the 24-bit marker rides the second suffix
                a &= 0xffffff;
                b &= 0xffffff;
            }
            if (root == "mul_hi") {
                uint64_t prod = t.is_signed()
                                    ? uint64_t(int64_t(int32_t(a)) * int64_t(int32_t(b)))
                                    : a * b;
                write_vdst(ops[0], uint32_t(prod >> 32));
            } else if (t.is_float()) {
                write_vdst(ops[0],
                           float_to_bits(bits_to_float(uint32_t(a)) * bits_to_float(uint32_t(b))));
            } else {
                write_vdst(ops[0], uint32_t(a * b));
            }
            return;
        }
        if (root == "mac" && ops.size() >= 3) {
            if (!t.is_float())
                unsupported(i, "v_mac outside f32");
            float r = bits_to_float(read32(ops[1])) * bits_to_float(read32(ops[2]));
            r = r + bits_to_float(read32(ops[0]));
            write_vdst(ops[0], float_to_bits(r));
            return;
        }
        if (root == "mad" && ops.size() >= 4) {
            if (t.is_float()) {
                float r = bits_to_float(read32(ops[1])) * bits_to_float(read32(ops[2]));
                r = r + bits_to_float(read32(ops[3]));
                write_vdst(ops[0], float_to_bits(r));
            } else {
                uint32_t a = read32(ops[1]), b = read32(ops[2]), c = read32(ops[3]);
                if (mul24_operands(i)) {
                    a &= 0xffffff;
                    b &= 0xffffff;
                }
                write_vdst(ops[0], a * b + c);
            }
            return;
        }
        if ((root == "lshlrev" || root == "lshrrev" || root == "ashrrev" || root == "lshl" ||
             root == "lshr" || root == "ashr") &&
            ops.size() >= 3) {
            const bool rev = root.size() > 4;
            uint32_t sh = read32(ops[rev ? 1 : 2]) & 31;
            uint32_t a = read32(ops[rev ? 2 : 1]);
            uint32_t r;
            if (root.rfind("lshl", 0) == 0)
                r = a << sh;
            else if (root.rfind("lshr", 0) == 0)
                r = a >> sh;
            else
                r = uint32_t(int32_t(a) >> sh);
            write_vdst(ops[0], r);
            return;
        }
        if ((root == "and" || root == "or" || root == "xor") && ops.size() >= 3) {
            uint32_t a = read32(ops[1]), b = read32(ops[2]);
            uint32_t r = root == "and" ? (a & b) : root == "or" ? (a | b) : (a ^ b);
            write_vdst(ops[0], r);
            return;
        }
        if (root.rfind("cmp_", 0) == 0 && ops.size() >= 3) {
            bool r = compare(root.substr(4), stype(i, DataType::signed_int(32)), read32(ops[1]),
                             read32(ops[2]));
            uint64_t bit = (lane_on() && r) ? 1 : 0;
            if (ops[0].is_special(SpecialReg::Vcc))
                vcc = bit;
            else if (ops[0].is_sreg() && ops[0].count == 2)
                write_sdst64(ops[0], bit);
            else
                unsupported(i, "compare destination");
            return;
        }

        unsupported(i, "vector instruction " + i.mnemonic);
    }

    void write_carry(const Operand &op, uint64_t bit) {
        const uint64_t masked = lane_on() ? bit : 0;
        if (op.is_special(SpecialReg::Vcc))
            vcc = masked;
        else
            write_sdst64(op, masked);
    }

    void flat(const Instruction &i) {
        const std::string &root = i.parts.root;
        const auto &ops = i.operands;
        if (ops.size() < 2)
            unsupported(i, "flat operands");

        if (root == "load_dword" || root == "load_dwordx2") {
            uint64_t addr = read64(ops[1]);
            unsigned dwords = root.back() == '2' ? 2 : 1;
            for (unsigned k = 0; k < dwords; ++k)
                if (lane_on())
                    v.at(ops[0].first + k) = load_dword(addr + 4 * k);
            return;
        }
        if (root == "store_dword" || root == "store_dwordx2") {
            uint64_t addr = read64(ops[0]);
            unsigned dwords = root.back() == '2' ? 2 : 1;
            for (unsigned k = 0; k < dwords; ++k)
                if (lane_on())
                    mem.store(addr + 4 * k, v.at(ops[1].first + k));
            return;
        }
        unsupported(i, "flat instruction " + i.mnemonic);
    }
};

} // namespace

uint32_t OracleEnv::initial_memory(uint64_t addr) const {
    return uint32_t(splitmix64(addr ^ mem_seed));
}

WriteTrace interpret_asm(const std::vector<Instruction> &instructions,
                         const KernelConfig &config, const AbiMap &abi, const OracleEnv &env) {
    Machine m(instructions, config, abi, env);
    m.run();
    return std::move(m.mem.trace);
}

namespace {

struct Evaluator {
    const KernelConfig &config;
    const OracleEnv &env;
    Memory mem;
    std::map<std::string, uint64_t> vars;

    Evaluator(const KernelConfig &c, const OracleEnv &e) : config(c), env(e), mem(e) {}

    static uint64_t mask_to(uint64_t value, uint8_t bits) {
        return bits >= 64 ? value : value & ((1ull << bits) - 1);
    }

    uint64_t builtin_value(const BuiltinId &b) const {
        switch (b.fn) {
        case BuiltinFn::GlobalId: return env.global_id(b.dim);
        case BuiltinFn::LocalId: return env.local_id[size_t(b.dim)];
        case BuiltinFn::GroupId: return env.group_id[size_t(b.dim)];
        case BuiltinFn::GlobalSize: return env.global_size(b.dim);
        case BuiltinFn::LocalSize: return env.cws[size_t(b.dim)];
        case BuiltinFn::NumGroups: return env.num_groups[size_t(b.dim)];
        case BuiltinFn::GlobalOffset: return env.global_offset[size_t(b.dim)];
        case BuiltinFn::WorkDim: return uint64_t(env.dims);
        }
        return 0;
    }

    uint64_t load_width(uint64_t addr, uint32_t bytes) {
        if (bytes == 8)
            return uint64_t(mem.load(addr)) | (uint64_t(mem.load(addr + 4)) << 32);
        return mem.load(addr);
    }

    // Sign- or zero-extends `value` (of `from` type) to 64 bits for a
    // widening cast.
    static uint64_t extend(uint64_t value, DataType from) {
        if (from.bits >= 64)
            return value;
        value = mask_to(value, from.bits);
        if (from.is_signed() && from.bits == 32 && (value >> 31))
            return value | 0xffffffff00000000ull;
        return value;
    }

    uint64_t eval(const ExprPtr &e) {
        if (!e)
            throw OracleUnsupported("missing expression");
        switch (e->kind) {
        case ExprKind::Const:
            return e->const_value;
        case ExprKind::Builtin:
            return mask_to(builtin_value(e->builtin), e->type.bits);
        case ExprKind::KernelArg: {
            auto it = env.arg_values.find(e->name);
            uint64_t raw = it != env.arg_values.end() ? it->second : 0;
            return mask_to(raw, e->type.is_pointer() ? 64 : e->type.bits);
        }
        case ExprKind::KernargBase:
            return kSettingsBase;
        case ExprKind::Var: {
            auto it = vars.find(e->name);
            return it != vars.end() ? it->second : 0;
        }
        case ExprKind::Unary:
            return eval_unary(e);
        case ExprKind::Binary:
            return eval_binary(e);
        case ExprKind::Ternary:
            return eval(e->a) ? eval(e->b) : eval(e->c);
        case ExprKind::Deref:
            return load_width(eval(e->a), e->type.byte_size());
        }
        throw OracleUnsupported("expression kind");
    }

    uint64_t eval_unary(const ExprPtr &e) {
        uint64_t a = eval(e->a);
        switch (e->un_op) {
        case UnaryOp::LogicalNot: return a == 0;
        case UnaryOp::BitNot: return mask_to(~a, e->type.bits);
        case UnaryOp::Neg: return mask_to(~a + 1, e->type.bits);
        case UnaryOp::Lo32: return a & 0xffffffffull;
        case UnaryOp::Hi32: return a >> 32;
        case UnaryOp::Cast:
            // Same-width float/int casts reinterpret; widening extends by
            // the source signedness; narrowing truncates.
            if (e->type.bits > e->a->type.bits)
                return extend(a, e->a->type);
            return mask_to(a, e->type.bits);
        }
        throw OracleUnsupported("unary operator");
    }

    uint64_t eval_binary(const ExprPtr &e) {
        const BinaryOp op = e->bin_op;
        if (op == BinaryOp::Concat64)
            return (eval(e->a) & 0xffffffffull) | (eval(e->b) << 32);

        uint64_t a = eval(e->a);
        uint64_t b = eval(e->b);
        const uint8_t bits = e->type.bits >= 64 ? 64 : 32;

        if (e->type.is_float() || (is_comparison(op) && e->a->type.is_float())) {
            float x = bits_to_float(uint32_t(a));
            float y = bits_to_float(uint32_t(b));
            switch (op) {
            case BinaryOp::Add: return float_to_bits(x + y);
            case BinaryOp::Sub: return float_to_bits(x - y);
            case BinaryOp::Mul: return float_to_bits(x * y);
            case BinaryOp::Div: return float_to_bits(x / y);
            case BinaryOp::CmpEq: return x == y;
            case BinaryOp::CmpNe: return x != y;
            case BinaryOp::CmpLt: return x < y;
            case BinaryOp::CmpLe: return x <= y;
            case BinaryOp::CmpGt: return x > y;
            case BinaryOp::CmpGe: return x >= y;
            default:
                throw OracleUnsupported("float operator");
            }
        }

        const uint8_t opnd_bits = std::max(e->a->type.bits, e->b->type.bits);
        auto s_of = [&](uint64_t u) {
            return opnd_bits >= 64 ? int64_t(u) : int64_t(int32_t(uint32_t(u)));
        };
        auto u_of = [&](uint64_t u) { return opnd_bits >= 64 ? u : (u & 0xffffffffull); };

        switch (op) {
        case BinaryOp::Add: return mask_to(a + b, bits);
        case BinaryOp::Sub: return mask_to(a - b, bits);
        case BinaryOp::Mul: return mask_to(a * b, bits);
        case BinaryOp::Div:
            if (u_of(b) == 0)
                throw OracleUnsupported("division by zero");
            return mask_to(u_of(a) / u_of(b), bits);
        case BinaryOp::MulHi:
            return uint32_t(((a & 0xffffffffull) * (b & 0xffffffffull)) >> 32);
        case BinaryOp::MulHiS:
            return uint32_t(uint64_t(int64_t(int32_t(uint32_t(a))) *
                                     int64_t(int32_t(uint32_t(b)))) >>
                            32);
        case BinaryOp::And: return a & b;
        case BinaryOp::Or: return a | b;
        case BinaryOp::Xor: return mask_to(a ^ b, bits);
        case BinaryOp::Shl: return mask_to(a << (b & (bits - 1)), bits);
        case BinaryOp::LShr: return mask_to(a, bits) >> (b & (bits - 1));
        case BinaryOp::AShr:
            if (bits == 64)
                return uint64_t(int64_t(a) >> (b & 63));
            return uint32_t(int32_t(uint32_t(a)) >> (b & 31));
        case BinaryOp::CmpEq: return u_of(a) == u_of(b);
        case BinaryOp::CmpNe: return u_of(a) != u_of(b);
        case BinaryOp::CmpLt: return s_of(a) < s_of(b);
        case BinaryOp::CmpLe: return s_of(a) <= s_of(b);
        case BinaryOp::CmpGt: return s_of(a) > s_of(b);
        case BinaryOp::CmpGe: return s_of(a) >= s_of(b);
        case BinaryOp::CmpLtU: return u_of(a) < u_of(b);
        case BinaryOp::CmpLeU: return u_of(a) <= u_of(b);
        case BinaryOp::CmpGtU: return u_of(a) > u_of(b);
        case BinaryOp::CmpGeU: return u_of(a) >= u_of(b);
        default:
            throw OracleUnsupported("binary operator");
        }
    }

    void exec_body(const std::vector<Stmt> &body) {
        for (const Stmt &s : body)
            exec_stmt(s);
    }

    void exec_stmt(const Stmt &s) {
        switch (s.kind) {
        case StmtKind::Basic: {
            const Statement &st = s.base;
            switch (st.kind) {
            case StatementKind::Assign:
                vars[st.name] = eval(st.value);
                return;
            case StatementKind::Decl:
                vars[st.name] = st.value ? eval(st.value) : 0;
                return;
            case StatementKind::Store: {
                uint64_t addr = eval(st.addr);
                uint64_t value = eval(st.value);
                mem.store(addr, uint32_t(value));
                if (st.elem_type.byte_size() == 8)
                    mem.store(addr + 4, uint32_t(value >> 32));
                return;
            }
            case StatementKind::RawAsm:
                throw OracleUnsupported("inline assembly in lowered body");
            }
            return;
        }
        case StmtKind::If:
            if (eval(s.cond))
                exec_body(s.then_body);
            else
                exec_body(s.else_body);
            return;
        case StmtKind::Label:
        case StmtKind::Goto:
            throw OracleUnsupported("unstructured control flow in lowered body");
        }
    }
};

} // namespace

WriteTrace evaluate_decompiled(const LoweredBody &body, const KernelConfig &config,
                               const OracleEnv &env) {
    Evaluator ev(config, env);
    ev.exec_body(body.stmts);
    return std::move(ev.mem.trace);
}

} // namespace ocldec
