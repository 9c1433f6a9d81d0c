// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/sym_state.hpp"

#include <sstream>

#include "ocldec/builtin_detector.hpp"
#include "ocldec/structurizer.hpp"

namespace ocldec {

std::string reg_id_name(unsigned id) {
    std::ostringstream os;
    if (id < kRegIdVgpr0) {
        os << 's' << id;
    } else if (id < kRegIdExecLo) {
        os << 'v' << (id - kRegIdVgpr0);
    } else {
        switch (id) {
        case kRegIdExecLo:
        case kRegIdExecHi: return "exec";
        case kRegIdVccLo:
        case kRegIdVccHi: return "vcc";
        case kRegIdScc: return "scc";
        default: return "m0";
        }
    }
    return os.str();
}

std::string reg_display_name(unsigned reg_id) { return reg_id_name(reg_id); }

RegisterSlot &RegisterFile::slot(unsigned reg_id) {
    if (reg_id < kRegIdVgpr0)
        return sgprs_.at(reg_id);
    if (reg_id < kRegIdExecLo)
        return vgprs_.at(reg_id - kRegIdVgpr0);
    switch (reg_id) {
    case kRegIdExecLo:
    case kRegIdExecHi: return exec_;
    case kRegIdVccLo:
    case kRegIdVccHi: return vcc_;
    case kRegIdScc: return scc_;
    default: return m0_;
    }
}

const RegisterSlot &RegisterFile::slot(unsigned reg_id) const {
    return const_cast<RegisterFile *>(this)->slot(reg_id);
}

namespace {

DataType half_type() { return DataType::binary(32); }

// Binds an unbound slot to a fresh "<reg>_<version>" variable. A repeated
// name is fine here: a given register/version pair always denotes the same
// value, so two reads on different paths may share the variable.
ExprPtr bind_fresh(RegisterSlot &slot, const std::string &reg_name, const StepContext &ctx,
                   DataType type = DataType::binary(32)) {
    if (!slot.expr) {
        std::ostringstream os;
        os << reg_name << '_' << slot.version;
        if (slot.type.is_unknown())
            slot.type = type;
        slot.expr = Expr::var_ref(os.str(), slot.type);
        slot.integrity = Integrity::Entire;
        if (ctx.fresh_vars)
            ctx.fresh_vars->emplace_back(os.str(), slot.type);
        if (ctx.name_pool)
            ctx.name_pool->insert(os.str());
    }
    return slot.expr;
}

// 32-bit view of one register slot, extracting a half when the slot is
// part of a 64-bit pair.
ExprPtr read_slot32(RegisterFile &regs, unsigned reg_id, const StepContext &ctx) {
    RegisterSlot &slot = regs.slot(reg_id);
    bind_fresh(slot, reg_id_name(reg_id), ctx);
    switch (slot.integrity) {
    case Integrity::LowPart:
        return Expr::unary(UnaryOp::Lo32, slot.expr, half_type());
    case Integrity::HighPart:
        return Expr::unary(UnaryOp::Hi32, slot.expr, half_type());
    case Integrity::Entire:
        break;
    }
    return slot.expr;
}

ExprPtr concat64(const ExprPtr &lo, const ExprPtr &hi) {
    if (hi->is_const(0))
        return Expr::unary(UnaryOp::Cast, lo, DataType::unsigned_int(64));
    // Halves that were split off the same 64-bit value fuse back together;
    // pointers copied through v_mov pairs come back whole this way.
    if (lo->kind == ExprKind::Unary && lo->un_op == UnaryOp::Lo32 && hi->kind == ExprKind::Unary &&
        hi->un_op == UnaryOp::Hi32 && expr_equal(lo->a, hi->a))
        return lo->a;
    return Expr::binary(BinaryOp::Concat64, lo, hi, DataType::binary(64));
}

ExprPtr read_pair_ids(RegisterFile &regs, unsigned lo_id, const StepContext &ctx) {
    RegisterSlot &lo = regs.slot(lo_id);
    RegisterSlot &hi = regs.slot(lo_id + 1);
    if (lo.expr && lo.expr == hi.expr && lo.integrity == Integrity::LowPart &&
        hi.integrity == Integrity::HighPart)
        return lo.expr;
    return concat64(read_slot32(regs, lo_id, ctx), read_slot32(regs, lo_id + 1, ctx));
}

// Splits a 64-bit pair back into independent halves before one half is
// overwritten. The untouched half keeps its version.
void dissolve_pair(RegisterFile &regs, unsigned reg_id) {
    RegisterSlot &slot = regs.slot(reg_id);
    if (slot.integrity == Integrity::Entire || !slot.expr)
        return;
    const bool is_low = slot.integrity == Integrity::LowPart;
    if (reg_id >= kRegIdExecLo) { // exec/vcc: one slot, no partner register
        slot.integrity = Integrity::Entire;
        return;
    }
    unsigned partner_id = is_low ? reg_id + 1 : reg_id - 1;
    RegisterSlot &partner = regs.slot(partner_id);
    if (partner.expr == slot.expr) {
        partner.expr = Expr::unary(is_low ? UnaryOp::Hi32 : UnaryOp::Lo32, slot.expr, half_type());
        partner.integrity = Integrity::Entire;
        partner.type = half_type();
    }
    slot.integrity = Integrity::Entire;
}

void write_slot32(RegisterFile &regs, unsigned reg_id, ExprPtr value, DataType type) {
    dissolve_pair(regs, reg_id);
    RegisterSlot &slot = regs.slot(reg_id);
    slot.version += 1;
    slot.expr = std::move(value);
    slot.type = type;
    slot.integrity = Integrity::Entire;
}

void write_pair_ids(RegisterFile &regs, unsigned lo_id, ExprPtr value, DataType type) {
    if (lo_id >= kRegIdExecLo) { // exec/vcc: one slot carries the pair
        RegisterSlot &slot = regs.slot(lo_id);
        slot.version += 1;
        slot.expr = std::move(value);
        slot.type = type;
        slot.integrity = Integrity::Entire;
        return;
    }
    dissolve_pair(regs, lo_id);
    dissolve_pair(regs, lo_id + 1);
    RegisterSlot &lo = regs.slot(lo_id);
    RegisterSlot &hi = regs.slot(lo_id + 1);
    lo.version += 1;
    hi.version += 1;
    lo.expr = value;
    hi.expr = value;
    lo.type = type;
    hi.type = type;
    lo.integrity = Integrity::LowPart;
    hi.integrity = Integrity::HighPart;
}

void invalidate_slot(RegisterFile &regs, unsigned reg_id, unsigned count) {
    for (unsigned i = 0; i < count; ++i) {
        dissolve_pair(regs, reg_id + i);
        RegisterSlot &slot = regs.slot(reg_id + i);
        slot.version += 1;
        slot.expr = nullptr;
        slot.type = DataType::unknown();
        slot.integrity = Integrity::Entire;
        if (reg_id + i >= kRegIdExecLo)
            break; // specials are single slots
    }
}

unsigned operand_reg_id(const Operand &op) {
    switch (op.kind) {
    case OperandKind::SReg: return op.first;
    case OperandKind::VReg: return kRegIdVgpr0 + op.first;
    case OperandKind::Special:
        switch (op.special) {
        case SpecialReg::Exec:
        case SpecialReg::ExecLo: return kRegIdExecLo;
        case SpecialReg::ExecHi: return kRegIdExecHi;
        case SpecialReg::Vcc:
        case SpecialReg::VccLo: return kRegIdVccLo;
        case SpecialReg::VccHi: return kRegIdVccHi;
        case SpecialReg::Scc: return kRegIdScc;
        case SpecialReg::M0: return kRegIdM0;
        }
        return kRegIdM0;
    default:
        return kNumRegIds;
    }
}

} // namespace

ExprPtr read_operand(RegisterFile &regs, const Operand &op, const StepContext &ctx) {
    switch (op.kind) {
    case OperandKind::Literal:
        // Hardware encodes a 32-bit literal here; a negative token must not
        // leak its sign extension into the upper half.
        return Expr::constant(uint64_t(op.value) & 0xffffffffull, DataType::binary(32));
    case OperandKind::SReg:
    case OperandKind::VReg:
        if (op.count >= 2)
            return read_pair(regs, op, ctx);
        return read_slot32(regs, operand_reg_id(op), ctx);
    case OperandKind::Special: {
        unsigned id = operand_reg_id(op);
        RegisterSlot &slot = regs.slot(id);
        DataType t = (op.special == SpecialReg::Exec || op.special == SpecialReg::Vcc)
                         ? DataType::binary(64)
                         : DataType::binary(32);
        return bind_fresh(slot, reg_id_name(id), ctx, t);
    }
    default:
        return nullptr;
    }
}

ExprPtr read_pair(RegisterFile &regs, const Operand &op, const StepContext &ctx) {
    if (op.kind == OperandKind::Literal)
        return Expr::constant(uint64_t(op.value), DataType::binary(64));
    if (op.kind == OperandKind::Special)
        return read_operand(regs, op, ctx);
    if (op.kind == OperandKind::SReg || op.kind == OperandKind::VReg) {
        if (op.count < 2)
            return read_slot32(regs, operand_reg_id(op), ctx); // tolerated
        return read_pair_ids(regs, operand_reg_id(op), ctx);
    }
    return nullptr;
}

namespace {

struct Stepper {
    RegisterFile &regs;
    const Instruction &ins;
    const StepContext &ctx;
    std::vector<Statement> &stmts;

    void warn(const std::string &msg) const {
        if (ctx.sink)
            ctx.sink->warning(ins.line, msg);
    }

    ExprPtr read(const Operand &op) { return read_operand(regs, op, ctx); }
    ExprPtr read64(const Operand &op) { return read_pair(regs, op, ctx); }

    // Writes through a destination operand, choosing 32-bit, pair or
    // special form by its shape.
    void write(const Operand &op, ExprPtr value, DataType type) {
        unsigned id = operand_reg_id(op);
        if (id >= kNumRegIds)
            return;
        const bool pair = op.count >= 2 ||
                          (op.kind == OperandKind::Special &&
                           (op.special == SpecialReg::Exec || op.special == SpecialReg::Vcc));
        if (pair)
            write_pair_ids(regs, id, std::move(value), type);
        else
            write_slot32(regs, id, std::move(value), type);
    }

    void fallback() {
        Statement s;
        s.kind = StatementKind::RawAsm;
        s.text = ins.source_text;
        s.line = ins.line;
        stmts.push_back(std::move(s));
        // The instruction's effect on its destination is unknown.
        for (const Operand &op : ins.operands) {
            unsigned id = operand_reg_id(op);
            if (id < kNumRegIds) {
                invalidate_slot(regs, id, op.count);
                break;
            }
        }
        regs.clear_pending_add();
    }

    DataType suffix_type(size_t index, DataType fallback_type = DataType::binary(32)) const {
        if (index < ins.parts.suffixes.size())
            return type_from_suffix(ins.parts.suffixes[index]);
        return fallback_type;
    }

    // Reinterprets an expression as `want` without changing bits.
    // Constants are retagged; float<->int reinterpretation becomes a cast
    // node (rendered as as_float/as_uint); integer sign changes are left
    // alone, the operation's own signedness carries the meaning.
    ExprPtr coerce(const ExprPtr &e, DataType want) const {
        if (!e)
            return e;
        if (e->type.base == want.base && e->type.bits == want.bits)
            return e;
        if (e->is_const())
            return Expr::constant(e->const_value, want);
        if (want.is_float() != e->type.is_float())
            return Expr::unary(UnaryOp::Cast, e, want);
        return e;
    }

    bool handle_scalar();
    bool handle_vector();
    bool handle_flat();
    void do_scalar_load(unsigned dwords);
    void do_flat_load(unsigned dwords);
    void do_flat_store(unsigned dwords);
    bool do_compare(bool vector_side);
    DataType pointee_of(const ExprPtr &addr) const;
};

// Finds the pointer argument a flat address is based on, if any.
const Expr *pointer_base(const Expr *e) {
    while (e) {
        if (e->kind == ExprKind::KernelArg && e->type.is_pointer())
            return e;
        if (e->kind == ExprKind::Binary && e->bin_op == BinaryOp::Add) {
            if (const Expr *hit = pointer_base(e->a.get()))
                return hit;
            e = e->b.get();
            continue;
        }
        if (e->kind == ExprKind::Unary && e->un_op == UnaryOp::Cast) {
            e = e->a.get();
            continue;
        }
        break;
    }
    return nullptr;
}

DataType Stepper::pointee_of(const ExprPtr &addr) const {
    if (const Expr *base = pointer_base(addr.get()))
        return base->type.pointee();
    return DataType::binary(32);
}

void Stepper::do_scalar_load(unsigned dwords) {
    if (ins.operands.size() < 2 || !ins.operands[0].is_sreg())
        return fallback();
    const Operand &dst = ins.operands[0];
    const Operand &base_op = ins.operands[1];
    uint64_t offset = 0;
    if (ins.operands.size() >= 3 && ins.operands[2].is_literal())
        offset = uint64_t(ins.operands[2].value);

    ExprPtr base = read64(base_op);
    if (base && base->kind == ExprKind::KernargBase && ctx.abi && ctx.config) {
        if (dwords <= 2) {
            if (ExprPtr value =
                    match_settings_load(*ctx.abi, *ctx.config, uint32_t(offset), dwords)) {
                if (dwords == 2)
                    write_pair_ids(regs, dst.first, value, value->type);
                else
                    write_slot32(regs, dst.first, value, value->type);
                return;
            }
        }
        // Wide or unaligned load: resolve dword by dword.
        bool all_known = true;
        for (unsigned i = 0; i < dwords && all_known; ++i) {
            bool second = false;
            all_known = ctx.abi->find_dword(uint32_t(offset) + 4 * i, &second) != nullptr;
        }
        if (all_known) {
            for (unsigned i = 0; i < dwords;) {
                bool second = false;
                const AbiEntry *e = ctx.abi->find_dword(uint32_t(offset) + 4 * i, &second);
                ExprPtr value = match_settings_load(*ctx.abi, *ctx.config, e->offset, e->dwords);
                if (e->dwords == 2 && !second && i + 1 < dwords) {
                    write_pair_ids(regs, dst.first + i, value, value->type);
                    i += 2;
                } else {
                    ExprPtr half = e->dwords == 2
                                       ? Expr::unary(second ? UnaryOp::Hi32 : UnaryOp::Lo32,
                                                     value, half_type())
                                       : value;
                    write_slot32(regs, dst.first + i, half, half->type);
                    i += 1;
                }
            }
            return;
        }
        warn("scalar load from unmapped settings offset");
    }

    // Generic pointer: keep the loads as dereferences.
    for (unsigned i = 0; i < dwords; ++i) {
        ExprPtr addr = Expr::binary(BinaryOp::Add, base,
                                    Expr::constant(offset + 4 * i, DataType::unsigned_int(64)),
                                    DataType::unsigned_int(64));
        ExprPtr value = Expr::deref(addr, DataType::binary(32), AddressSpace::Global);
        write_slot32(regs, dst.first + i, value, value->type);
    }
}

bool Stepper::do_compare(bool vector_side) {
    const std::string &root = ins.parts.root;
    size_t us = root.find('_');
    if (us == std::string::npos)
        return false;
    std::string op_name = root.substr(us + 1);

    DataType cmp_type = suffix_type(0, DataType::signed_int(32));
    const bool uns = cmp_type.base == BaseType::UnsignedInt;

    BinaryOp op;
    if (op_name == "eq")
        op = BinaryOp::CmpEq;
    else if (op_name == "ne" || op_name == "lg" || op_name == "neq")
        op = BinaryOp::CmpNe;
    else if (op_name == "lt")
        op = uns ? BinaryOp::CmpLtU : BinaryOp::CmpLt;
    else if (op_name == "le")
        op = uns ? BinaryOp::CmpLeU : BinaryOp::CmpLe;
    else if (op_name == "gt")
        op = uns ? BinaryOp::CmpGtU : BinaryOp::CmpGt;
    else if (op_name == "ge")
        op = uns ? BinaryOp::CmpGeU : BinaryOp::CmpGe;
    else
        return false;

    size_t first_src = vector_side ? 1 : 0;
    if (ins.operands.size() < first_src + 2)
        return false;

    ExprPtr a = read(ins.operands[first_src]);
    ExprPtr b = read(ins.operands[first_src + 1]);
    if (cmp_type.is_float()) {
        a = coerce(a, cmp_type);
        b = coerce(b, cmp_type);
    } else if (a && a->is_const()) {
        a = Expr::constant(a->const_value, cmp_type);
    }
    if (!cmp_type.is_float() && b && b->is_const())
        b = Expr::constant(b->const_value, cmp_type);

    ExprPtr cmp = Expr::binary(op, a, b, DataType::signed_int(32));

    if (vector_side) {
        write(ins.operands[0], cmp, DataType::binary(64));
    } else {
        RegisterSlot &scc = regs.scc();
        scc.version += 1;
        scc.expr = cmp;
        scc.type = DataType::signed_int(32);
        scc.integrity = Integrity::Entire;
    }
    return true;
}

bool Stepper::handle_scalar() {
    const std::string &root = ins.parts.root;
    const auto &ops = ins.operands;

    // Anything that writes the exec mask belongs to a save/invert/restore
    // pattern. Those are consumed by the mask normalization; one surviving
    // into lowering means the pattern match declined, and modelling it as
    // a plain register move would silently drop the lane masking. Refuse
    // it so the instruction lands in a verbatim fallback instead.
    if (!ops.empty() && ops[0].kind == OperandKind::Special &&
        (ops[0].special == SpecialReg::Exec || ops[0].special == SpecialReg::ExecLo ||
         ops[0].special == SpecialReg::ExecHi))
        return false;

    if (root == "load_dword") return do_scalar_load(1), true;
    if (root == "load_dwordx2") return do_scalar_load(2), true;
    if (root == "load_dwordx4") return do_scalar_load(4), true;

    if (root == "mov" && ops.size() >= 2) {
        DataType t = suffix_type(0);
        if (t.bits == 64) {
            ExprPtr v = read64(ops[1]);
            write(ops[0], v, v->type);
        } else {
            ExprPtr v = read(ops[1]);
            write(ops[0], v, v->type);
        }
        return true;
    }

    if ((root == "add" || root == "sub" || root == "mul" || root == "addk" ||
         root == "mulk") &&
        ops.size() >= 2) {
        const bool k_form = root == "addk" || root == "mulk"; // dst doubles as src0
        if (!k_form && ops.size() < 3)
            return false;
        DataType t = suffix_type(0, DataType::signed_int(32));
        ExprPtr a = coerce(read(ops[k_form ? 0 : 1]), t);
        ExprPtr b = coerce(read(ops[k_form ? 1 : 2]), t);
        BinaryOp op = BinaryOp::Add;
        if (root == "sub")
            op = BinaryOp::Sub;
        else if (root == "mul" || root == "mulk")
            op = BinaryOp::Mul;
        write(ops[0], Expr::binary(op, a, b, t), t);
        invalidate_slot(regs, kRegIdScc, 1);
        return true;
    }

    if ((root == "and" || root == "or" || root == "xor" || root == "andn2") &&
        ops.size() >= 3) {
        DataType t = suffix_type(0);
        const bool wide = t.bits == 64;
        ExprPtr a = wide ? read64(ops[1]) : read(ops[1]);
        ExprPtr b = wide ? read64(ops[2]) : read(ops[2]);
        ExprPtr value;
        if (root == "andn2")
            value = Expr::binary(BinaryOp::And, a, Expr::unary(UnaryOp::BitNot, b, t), t);
        else if (root == "and")
            value = Expr::binary(BinaryOp::And, a, b, t);
        else if (root == "or")
            value = Expr::binary(BinaryOp::Or, a, b, t);
        else
            value = Expr::binary(BinaryOp::Xor, a, b, t);
        write(ops[0], value, t);
        invalidate_slot(regs, kRegIdScc, 1);
        return true;
    }

    if ((root == "lshl" || root == "lshr" || root == "ashr") && ops.size() >= 3) {
        DataType t = suffix_type(0);
        const bool wide = t.bits == 64;
        ExprPtr a = wide ? read64(ops[1]) : read(ops[1]);
        ExprPtr b = read(ops[2]);
        BinaryOp op = root == "lshl" ? BinaryOp::Shl
                                     : (root == "lshr" ? BinaryOp::LShr : BinaryOp::AShr);
        write(ops[0], Expr::binary(op, a, b, t), t);
        invalidate_slot(regs, kRegIdScc, 1);
        return true;
    }

    if (root.rfind("cmp_", 0) == 0)
        return do_compare(false);

    // s_and_saveexec_b64 also writes exec; see the guard above.
    if (root == "and_saveexec")
        return false;

    if (root == "waitcnt" || root == "nop" || root == "endpgm" || root == "branch" ||
        root.rfind("cbranch_", 0) == 0)
        return true; // no data effect; flow is the CFG's business

    return false;
}

namespace {

// v_mul_u32_u24 and friends read only the low 24 bits of their sources. The
// signed forms sign-extend instead; those stay on the fallback path.
enum class Src24 { None, Unsigned, Signed };

Src24 src24_kind(const MnemonicParts &parts) {
    for (const TypeSuffix &s : parts.suffixes)
        if (s.bits == 24)
            return s.base == 'i' ? Src24::Signed : Src24::Unsigned;
    return Src24::None;
}

ExprPtr mask24(ExprPtr e) {
    DataType t = DataType::unsigned_int(32);
    return Expr::binary(BinaryOp::And, std::move(e), Expr::constant(0xffffff, t), t);
}

} // namespace

bool Stepper::handle_vector() {
    const std::string &root = ins.parts.root;
    const auto &ops = ins.operands;

    if (root == "mov" && ops.size() >= 2) {
        ExprPtr v = read(ops[1]);
        write(ops[0], v, v ? v->type : DataType::binary(32));
        return true;
    }

    if (auto t3 = detect_ternary(ins)) {
        ExprPtr cond = read(t3->cond);
        ExprPtr a = read(t3->src0);
        ExprPtr b = read(t3->src1);
        // D = cc ? SRC1 : SRC0
        DataType t = b ? b->type : DataType::binary(32);
        write(ops[0], Expr::ternary(cond, b, a, t), t);
        return true;
    }

    if ((root == "add" || root == "sub" || root == "subrev") && ops.size() >= 3) {
        // VI encoding carries a carry-out SGPR (usually vcc) after dst.
        size_t src0 = 1;
        bool carry_out = false;
        if (ops[1].is_special(SpecialReg::Vcc) || (ops[1].is_sreg() && ops[1].count == 2)) {
            src0 = 2;
            carry_out = true;
        }
        if (ops.size() < src0 + 2)
            return false;
        DataType t = suffix_type(0, DataType::unsigned_int(32));
        ExprPtr a = coerce(read(ops[src0]), t);
        ExprPtr b = coerce(read(ops[src0 + 1]), t);
        if (root == "subrev")
            std::swap(a, b);
        BinaryOp op = root == "add" ? BinaryOp::Add : BinaryOp::Sub;
        ExprPtr value = Expr::binary(op, a, b, t);

        PendingAdd64 pending;
        if (root == "add" && carry_out && ops[0].is_vreg()) {
            // One side the low half of a 64-bit value: remember it so the
            // following v_addc can rebuild the full pointer.
            ExprPtr lo_side, other;
            if (a->kind == ExprKind::Unary && a->un_op == UnaryOp::Lo32) {
                lo_side = a;
                other = b;
            } else if (b->kind == ExprKind::Unary && b->un_op == UnaryOp::Lo32) {
                lo_side = b;
                other = a;
            }
            if (lo_side) {
                pending.valid = true;
                pending.lo_vgpr = ops[0].first;
                pending.base64 = lo_side->a;
                pending.addend = other;
            }
        }

        write(ops[0], value, t);
        if (carry_out)
            invalidate_slot(regs, operand_reg_id(ops[1]), ops[1].count);
        regs.pending_add() = pending;
        if (pending.valid)
            regs.pending_add().lo_version = regs.slot(kRegIdVgpr0 + pending.lo_vgpr).version;
        return true;
    }

    if (root == "addc" && ops.size() >= 5) {
        const PendingAdd64 pending = regs.pending_add();
        regs.clear_pending_add();
        DataType t = suffix_type(0, DataType::unsigned_int(32));

        ExprPtr x = read(ops[2]);
        ExprPtr y = read(ops[3]);
        const bool carry_in_vcc = ops[4].is_special(SpecialReg::Vcc);

        if (pending.valid && carry_in_vcc && ops[0].is_vreg() &&
            ops[0].first == pending.lo_vgpr + 1 &&
            regs.slot(kRegIdVgpr0 + pending.lo_vgpr).version == pending.lo_version) {
            // Match "hi-half + 0 + carry" with either source order.
            ExprPtr hi_side, zero_side;
            if (x->kind == ExprKind::Unary && x->un_op == UnaryOp::Hi32 &&
                expr_equal(x->a, pending.base64)) {
                hi_side = x;
                zero_side = y;
            } else if (y->kind == ExprKind::Unary && y->un_op == UnaryOp::Hi32 &&
                       expr_equal(y->a, pending.base64)) {
                hi_side = y;
                zero_side = x;
            }
            if (hi_side && zero_side && zero_side->is_const(0)) {
                DataType sum_t = DataType::unsigned_int(64);
                ExprPtr addend64 =
                    Expr::unary(UnaryOp::Cast, pending.addend, DataType::unsigned_int(64));
                ExprPtr joint = Expr::binary(BinaryOp::Add, pending.base64, addend64, sum_t);
                // The low register was written by the v_add already; only
                // rebind it to the joint value, no second version bump.
                unsigned lo_id = kRegIdVgpr0 + pending.lo_vgpr;
                RegisterSlot &lo = regs.slot(lo_id);
                lo.expr = joint;
                lo.integrity = Integrity::LowPart;
                lo.type = sum_t;
                RegisterSlot &hi = regs.slot(lo_id + 1);
                hi.version += 1;
                hi.expr = joint;
                hi.integrity = Integrity::HighPart;
                hi.type = sum_t;
                invalidate_slot(regs, operand_reg_id(ops[1]), ops[1].count);
                return true;
            }
        }
        warn("v_addc_u32 outside the 64-bit add idiom; carry treated as zero");
        ExprPtr value = Expr::binary(BinaryOp::Add, coerce(x, t), coerce(y, t), t);
        write(ops[0], value, t);
        invalidate_slot(regs, operand_reg_id(ops[1]), ops[1].count);
        return true;
    }

    if ((root == "mul" || root == "mul_lo" || root == "mul_hi") && ops.size() >= 3) {
        const Src24 narrow = src24_kind(ins.parts);
        if (narrow == Src24::Signed)
            return false;
        DataType t = suffix_type(0, DataType::unsigned_int(32));
        ExprPtr a = coerce(read(ops[1]), t);
        ExprPtr b = coerce(read(ops[2]), t);
        if (narrow == Src24::Unsigned) {
            a = mask24(a);
            b = mask24(b);
        }
        BinaryOp op = BinaryOp::Mul;
        if (root == "mul_hi")
            op = t.is_signed() ? BinaryOp::MulHiS : BinaryOp::MulHi;
        write(ops[0], Expr::binary(op, a, b, t), t);
        return true;
    }

    if (root == "mac" && ops.size() >= 3) {
        DataType t = suffix_type(0, DataType::float_type(32));
        ExprPtr a = coerce(read(ops[1]), t);
        ExprPtr b = coerce(read(ops[2]), t);
        ExprPtr d = coerce(read(ops[0]), t);
        ExprPtr value = Expr::binary(BinaryOp::Add, Expr::binary(BinaryOp::Mul, a, b, t), d, t);
        write(ops[0], value, t);
        return true;
    }

    if (root == "mad" && ops.size() >= 4) {
        const Src24 narrow = src24_kind(ins.parts);
        if (narrow == Src24::Signed)
            return false;
        DataType t = suffix_type(0, DataType::float_type(32));
        ExprPtr a = coerce(read(ops[1]), t);
        ExprPtr b = coerce(read(ops[2]), t);
        ExprPtr c = coerce(read(ops[3]), t);
        if (narrow == Src24::Unsigned) {
            a = mask24(a);
            b = mask24(b);
        }
        ExprPtr value = Expr::binary(BinaryOp::Add, Expr::binary(BinaryOp::Mul, a, b, t), c, t);
        write(ops[0], value, t);
        return true;
    }

    if ((root == "lshlrev" || root == "lshrrev" || root == "ashrrev" || root == "lshl" ||
         root == "lshr" || root == "ashr") &&
        ops.size() >= 3) {
        const bool reversed = root.size() > 4; // *rev forms take the shift first
        ExprPtr shift = read(ops[reversed ? 1 : 2]);
        ExprPtr value = read(ops[reversed ? 2 : 1]);
        DataType t = root[0] == 'a' ? DataType::signed_int(32) : suffix_type(0);
        BinaryOp op = BinaryOp::Shl;
        if (root.rfind("lshr", 0) == 0)
            op = BinaryOp::LShr;
        else if (root.rfind("ashr", 0) == 0)
            op = BinaryOp::AShr;
        write(ops[0], Expr::binary(op, coerce(value, t), shift, t), t);
        return true;
    }

    if ((root == "and" || root == "or" || root == "xor") && ops.size() >= 3) {
        DataType t = suffix_type(0, DataType::binary(32));
        ExprPtr a = coerce(read(ops[1]), t);
        ExprPtr b = coerce(read(ops[2]), t);
        BinaryOp op = root == "and" ? BinaryOp::And : root == "or" ? BinaryOp::Or : BinaryOp::Xor;
        write(ops[0], Expr::binary(op, a, b, t), t);
        return true;
    }

    if (root.rfind("cmp_", 0) == 0)
        return do_compare(true);

    return false;
}

void Stepper::do_flat_load(unsigned dwords) {
    if (ins.operands.size() < 2)
        return fallback();
    const Operand &dst = ins.operands[0];
    ExprPtr addr = read64(ins.operands[1]);
    DataType elem = pointee_of(addr);

    if (dwords == 2 && elem.byte_size() == 8) {
        ExprPtr value = Expr::deref(addr, elem, AddressSpace::Global);
        write_pair_ids(regs, kRegIdVgpr0 + dst.first, value, elem);
        return;
    }
    DataType elem32 = elem.byte_size() == 4 ? elem : DataType::binary(32);
    for (unsigned i = 0; i < dwords; ++i) {
        ExprPtr a = i == 0 ? addr
                           : Expr::binary(BinaryOp::Add, addr,
                                          Expr::constant(4 * i, DataType::unsigned_int(64)),
                                          DataType::unsigned_int(64));
        ExprPtr value = Expr::deref(a, elem32, AddressSpace::Global);
        write_slot32(regs, kRegIdVgpr0 + dst.first + i, value, elem32);
    }
}

void Stepper::do_flat_store(unsigned dwords) {
    if (ins.operands.size() < 2)
        return fallback();
    ExprPtr addr = read64(ins.operands[0]);
    const Operand &data = ins.operands[1];
    DataType elem = pointee_of(addr);

    auto push_store = [&](ExprPtr a, ExprPtr value, DataType et) {
        Statement s;
        s.kind = StatementKind::Store;
        s.addr = std::move(a);
        s.value = std::move(value);
        s.elem_type = et;
        s.space = AddressSpace::Global;
        s.line = ins.line;
        stmts.push_back(std::move(s));
    };

    if (dwords == 2 && elem.byte_size() == 8 && data.count >= 2) {
        push_store(addr, read64(data), elem);
        return;
    }
    DataType elem32 = elem.byte_size() == 4 ? elem : DataType::binary(32);
    for (unsigned i = 0; i < dwords; ++i) {
        ExprPtr a = i == 0 ? addr
                           : Expr::binary(BinaryOp::Add, addr,
                                          Expr::constant(4 * i, DataType::unsigned_int(64)),
                                          DataType::unsigned_int(64));
        Operand piece = data;
        piece.first = data.first + i;
        piece.count = 1;
        push_store(a, read(piece), elem32);
    }
}

bool Stepper::handle_flat() {
    const std::string &root = ins.parts.root;
    if (root == "load_dword") return do_flat_load(1), true;
    if (root == "load_dwordx2") return do_flat_load(2), true;
    if (root == "store_dword") return do_flat_store(1), true;
    if (root == "store_dwordx2") return do_flat_store(2), true;
    return false;
}

} // namespace

StepResult step(const RegisterFile &regs, const Instruction &ins, const StepContext &ctx) {
    StepResult res{regs, {}};
    Stepper s{res.regs, ins, ctx, res.stmts};

    if (ins.parse_failed) {
        s.fallback();
        return res;
    }

    bool handled = false;
    if (ins.parts.prefix == "s")
        handled = s.handle_scalar();
    else if (ins.parts.prefix == "v")
        handled = s.handle_vector();
    else if (ins.parts.prefix == "flat")
        handled = s.handle_flat();

    if (!handled)
        s.fallback();

    // Anything other than the add/addc sequence breaks the 64-bit idiom.
    if (!(ins.parts.prefix == "v" && (ins.parts.root == "add" || ins.parts.root == "addc")))
        res.regs.clear_pending_add();
    return res;
}

JoinResult merge_at_join(const RegisterFile &then_state, const RegisterFile &else_state,
                         const std::vector<bool> &live_at_join, const StepContext &ctx) {
    JoinResult result{then_state, {}};
    RegisterFile &merged = result.regs;

    auto live = [&](unsigned id) { return id < live_at_join.size() ? live_at_join[id] : true; };

    // Work over 32-bit units; the special pair slots (exec, vcc) are one
    // unit each. Exec is control state restored by suppressed mask
    // instructions, not data: the then side passes through.
    for (unsigned id = 0; id < kNumRegIds; ++id) {
        if (id == kRegIdExecLo || id == kRegIdExecHi || id == kRegIdVccHi)
            continue;
        const RegisterSlot &a = then_state.slot(id);
        const RegisterSlot &b = else_state.slot(id);
        if (a.version == b.version &&
            (!a.expr || !b.expr || expr_equal(a.expr, b.expr))) {
            // No write in either arm (an unbound side or a shared fresh
            // variable both denote the common predecessor's value). Prefer
            // the bound side. Equal versions with differing expressions can
            // happen when both arms wrote the register the same number of
            // times; that case falls through to the join variable.
            if (!a.expr && b.expr)
                merged.slot(id) = b;
            continue;
        }

        uint32_t top = std::max(a.version, b.version);
        if (!live(id)) {
            RegisterSlot &m = merged.slot(id);
            m.version = top;
            m.expr = nullptr;
            m.type = DataType::unknown();
            m.integrity = Integrity::Entire;
            continue;
        }

        // Divergent and live: introduce a join variable.
        ExprPtr tv, ev;
        DataType vt = DataType::binary(32);
        if (id == kRegIdVccLo || id == kRegIdScc || id == kRegIdM0) {
            tv = a.expr;
            ev = b.expr;
        } else {
            if (a.expr) {
                RegisterFile scratch = then_state;
                tv = read_slot32(scratch, id, ctx);
            }
            if (b.expr) {
                RegisterFile scratch = else_state;
                ev = read_slot32(scratch, id, ctx);
            }
        }
        if (tv && ev)
            vt = unify(tv->type, ev->type).type;
        else if (tv)
            vt = tv->type;
        else if (ev)
            vt = ev->type;
        if (vt.is_unknown() || vt.is_pointer())
            vt = DataType::binary(vt.bits == 64 ? 64 : 32);

        // Join names must be unique kernel-wide: sibling scopes can reach
        // the same version count with different values.
        uint32_t serial = top + 1;
        std::string var_name;
        for (;;) {
            std::ostringstream name;
            name << reg_id_name(id) << '_' << serial;
            var_name = name.str();
            if (!ctx.name_pool || ctx.name_pool->insert(var_name).second)
                break;
            ++serial;
        }

        JoinFixup fx;
        fx.var_name = var_name;
        fx.var_type = vt;
        fx.then_value = tv;
        fx.else_value = ev;
        result.fixups.push_back(fx);

        RegisterSlot &m = merged.slot(id);
        m.version = top + 1;
        m.expr = Expr::var_ref(fx.var_name, vt);
        m.type = vt;
        m.integrity = Integrity::Entire;
    }

    merged.clear_pending_add();
    return result;
}

} // namespace ocldec
