// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#ifndef OCLDEC_REGISTERS_HPP
#define OCLDEC_REGISTERS_HPP

#include <array>
#include <cstdint>
#include <string>

#include "ocldec/expr.hpp"

namespace ocldec {

inline constexpr unsigned kSgprCount = 104;
inline constexpr unsigned kVgprCount = 256;

// Whether a 32-bit register currently holds a standalone value or one half
// of a 64-bit value whose joint expression is shared by both halves.
enum class Integrity : uint8_t { Entire, LowPart, HighPart };

// Symbolic contents of one register. `expr` is null while the register is
// unbound; the first read materializes a fresh variable named
// "<reg>_<version>". For Low/HighPart slots, `expr` is the joint 64-bit
// expression, identical (by pointer) in both halves.
struct RegisterSlot {
    uint32_t version = 0;
    DataType type;
    Integrity integrity = Integrity::Entire;
    ExprPtr expr;
};

// Dense register numbering shared by the symbolic state and the liveness
// pass: SGPRs, then VGPRs, then the specials.
enum : unsigned {
    kRegIdSgpr0 = 0,
    kRegIdVgpr0 = kRegIdSgpr0 + kSgprCount,
    kRegIdExecLo = kRegIdVgpr0 + kVgprCount,
    kRegIdExecHi,
    kRegIdVccLo,
    kRegIdVccHi,
    kRegIdScc,
    kRegIdM0,
    kNumRegIds,
};

std::string reg_id_name(unsigned id);

// In-flight state of the two-instruction 64-bit add idiom
// (v_add_u32 lo, vcc, a, b / v_addc_u32 hi, vcc, c, d, vcc).
struct PendingAdd64 {
    bool valid = false;
    unsigned lo_vgpr = 0;
    uint32_t lo_version = 0;
    ExprPtr base64;     // the 64-bit value whose low half fed the add
    ExprPtr addend;     // 32-bit addend
};

// Value-semantic register file: copying it is the snapshot operation used
// at control-flow splits. Expression nodes are immutable and shared, so
// copies are cheap.
class RegisterFile {
public:
    RegisterSlot &sgpr(unsigned i) { return sgprs_.at(i); }
    const RegisterSlot &sgpr(unsigned i) const { return sgprs_.at(i); }
    RegisterSlot &vgpr(unsigned i) { return vgprs_.at(i); }
    const RegisterSlot &vgpr(unsigned i) const { return vgprs_.at(i); }

    RegisterSlot &exec() { return exec_; }
    const RegisterSlot &exec() const { return exec_; }
    RegisterSlot &vcc() { return vcc_; }
    const RegisterSlot &vcc() const { return vcc_; }
    RegisterSlot &scc() { return scc_; }
    const RegisterSlot &scc() const { return scc_; }
    RegisterSlot &m0() { return m0_; }
    const RegisterSlot &m0() const { return m0_; }

    // Uniform access through the dense numbering (exec/vcc halves resolve
    // to the pair slot).
    RegisterSlot &slot(unsigned reg_id);
    const RegisterSlot &slot(unsigned reg_id) const;

    PendingAdd64 &pending_add() { return pending_add_; }
    const PendingAdd64 &pending_add() const { return pending_add_; }
    void clear_pending_add() { pending_add_ = {}; }

private:
    std::array<RegisterSlot, kSgprCount> sgprs_{};
    std::array<RegisterSlot, kVgprCount> vgprs_{};
    RegisterSlot exec_, vcc_, scc_, m0_;
    PendingAdd64 pending_add_;
};

} // namespace ocldec

#endif
