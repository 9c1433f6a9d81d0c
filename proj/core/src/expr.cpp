// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/expr.hpp"

namespace ocldec {

const char *builtin_name(BuiltinFn fn) {
    switch (fn) {
    case BuiltinFn::GlobalId: return "get_global_id";
    case BuiltinFn::LocalId: return "get_local_id";
    case BuiltinFn::GroupId: return "get_group_id";
    case BuiltinFn::GlobalSize: return "get_global_size";
    case BuiltinFn::LocalSize: return "get_local_size";
    case BuiltinFn::NumGroups: return "get_num_groups";
    case BuiltinFn::GlobalOffset: return "get_global_offset";
    case BuiltinFn::WorkDim: return "get_work_dim";
    }
    return "get_global_id";
}

namespace {

std::shared_ptr<Expr> make(ExprKind kind, DataType type) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->type = type;
    return e;
}

uint64_t width_mask(uint8_t bits) {
    return bits >= 64 ? ~uint64_t(0) : (uint64_t(1) << bits) - 1;
}

} // namespace

ExprPtr Expr::constant(uint64_t value, DataType type) {
    auto e = make(ExprKind::Const, type);
    e->const_value = value & width_mask(type.bits ? type.bits : 64);
    return e;
}

ExprPtr Expr::c32(uint32_t value) { return constant(value, DataType::binary(32)); }
ExprPtr Expr::c64(uint64_t value) { return constant(value, DataType::binary(64)); }

ExprPtr Expr::builtin_ref(BuiltinId id, DataType type) {
    auto e = make(ExprKind::Builtin, type);
    e->builtin = id;
    return e;
}

ExprPtr Expr::arg_ref(std::string name, DataType type) {
    auto e = make(ExprKind::KernelArg, type);
    e->name = std::move(name);
    return e;
}

ExprPtr Expr::kernarg_base() {
    return make(ExprKind::KernargBase, DataType::unsigned_int(64));
}

ExprPtr Expr::var_ref(std::string name, DataType type) {
    auto e = make(ExprKind::Var, type);
    e->name = std::move(name);
    return e;
}

ExprPtr Expr::unary(UnaryOp op, ExprPtr a, DataType type) {
    // Peephole: splitting a fresh 64-bit concat or a widened 32-bit value
    // back into halves should return the original pieces.
    if (a) {
        if (op == UnaryOp::Lo32 && a->kind == ExprKind::Binary && a->bin_op == BinaryOp::Concat64)
            return a->a;
        if (op == UnaryOp::Hi32 && a->kind == ExprKind::Binary && a->bin_op == BinaryOp::Concat64)
            return a->b;
        if (a->is_const()) {
            switch (op) {
            case UnaryOp::Lo32: return constant(uint32_t(a->const_value), type);
            case UnaryOp::Hi32: return constant(uint32_t(a->const_value >> 32), type);
            case UnaryOp::BitNot: return constant(~a->const_value, type);
            case UnaryOp::Neg: return constant(~a->const_value + 1, type);
            default: break;
            }
        }
    }
    auto e = make(ExprKind::Unary, type);
    e->un_op = op;
    e->a = std::move(a);
    return e;
}

ExprPtr Expr::binary(BinaryOp op, ExprPtr a, ExprPtr b, DataType type) {
    if (a && b && a->is_const() && b->is_const() && !type.is_float() && type.bits <= 32) {
        uint32_t x = uint32_t(a->const_value), y = uint32_t(b->const_value);
        bool folded = true;
        uint32_t v = 0;
        switch (op) {
        case BinaryOp::Add: v = x + y; break;
        case BinaryOp::Sub: v = x - y; break;
        case BinaryOp::Mul: v = x * y; break;
        case BinaryOp::And: v = x & y; break;
        case BinaryOp::Or: v = x | y; break;
        case BinaryOp::Xor: v = x ^ y; break;
        case BinaryOp::Shl: v = y >= 32 ? 0 : x << y; break;
        case BinaryOp::LShr: v = y >= 32 ? 0 : x >> y; break;
        default: folded = false; break;
        }
        if (folded)
            return constant(v, type);
    }
    if (a && b && b->is_const(0) &&
        (op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Or ||
         op == BinaryOp::Xor || op == BinaryOp::Shl || op == BinaryOp::LShr ||
         op == BinaryOp::AShr))
        return a;
    if (a && b && a->is_const(0) && (op == BinaryOp::Add || op == BinaryOp::Or))
        return b;
    if (a && b && op == BinaryOp::Mul) {
        if (b->is_const(1))
            return a;
        if (a->is_const(1))
            return b;
    }
    auto e = make(ExprKind::Binary, type);
    e->bin_op = op;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

ExprPtr Expr::ternary(ExprPtr cond, ExprPtr a, ExprPtr b, DataType type) {
    if (cond && cond->is_const())
        return cond->const_value ? a : b;
    auto e = make(ExprKind::Ternary, type);
    e->a = std::move(cond);
    e->b = std::move(a);
    e->c = std::move(b);
    return e;
}

ExprPtr Expr::deref(ExprPtr addr, DataType pointee, AddressSpace space) {
    DataType t = pointee;
    auto e = make(ExprKind::Deref, t);
    e->a = std::move(addr);
    e->type.addr_space = space; // remembered for the cast fallback rendering
    return e;
}

bool expr_equal(const ExprPtr &a, const ExprPtr &b) {
    if (a == b)
        return true;
    if (!a || !b || a->kind != b->kind)
        return false;
    switch (a->kind) {
    case ExprKind::Const:
        return a->const_value == b->const_value && a->type.bits == b->type.bits;
    case ExprKind::Builtin:
        return a->builtin == b->builtin;
    case ExprKind::KernelArg:
    case ExprKind::Var:
        return a->name == b->name;
    case ExprKind::KernargBase:
        return true;
    case ExprKind::Unary:
        return a->un_op == b->un_op && expr_equal(a->a, b->a);
    case ExprKind::Binary:
        return a->bin_op == b->bin_op && expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
    case ExprKind::Ternary:
        return expr_equal(a->a, b->a) && expr_equal(a->b, b->b) && expr_equal(a->c, b->c);
    case ExprKind::Deref:
        return expr_equal(a->a, b->a) && a->type == b->type;
    }
    return false;
}

void collect_add_terms(const ExprPtr &e, std::vector<ExprPtr> &out) {
    if (e && e->kind == ExprKind::Binary && e->bin_op == BinaryOp::Add) {
        collect_add_terms(e->a, out);
        collect_add_terms(e->b, out);
        return;
    }
    out.push_back(e);
}

bool is_comparison(BinaryOp op) {
    switch (op) {
    case BinaryOp::CmpEq:
    case BinaryOp::CmpNe:
    case BinaryOp::CmpLt:
    case BinaryOp::CmpLe:
    case BinaryOp::CmpGt:
    case BinaryOp::CmpGe:
    case BinaryOp::CmpLtU:
    case BinaryOp::CmpLeU:
    case BinaryOp::CmpGtU:
    case BinaryOp::CmpGeU:
        return true;
    default:
        return false;
    }
}

ExprPtr negate_condition(const ExprPtr &e) {
    if (e && e->kind == ExprKind::Binary) {
        BinaryOp flipped;
        switch (e->bin_op) {
        case BinaryOp::CmpEq: flipped = BinaryOp::CmpNe; break;
        case BinaryOp::CmpNe: flipped = BinaryOp::CmpEq; break;
        case BinaryOp::CmpLt: flipped = BinaryOp::CmpGe; break;
        case BinaryOp::CmpGe: flipped = BinaryOp::CmpLt; break;
        case BinaryOp::CmpGt: flipped = BinaryOp::CmpLe; break;
        case BinaryOp::CmpLe: flipped = BinaryOp::CmpGt; break;
        case BinaryOp::CmpLtU: flipped = BinaryOp::CmpGeU; break;
        case BinaryOp::CmpGeU: flipped = BinaryOp::CmpLtU; break;
        case BinaryOp::CmpGtU: flipped = BinaryOp::CmpLeU; break;
        case BinaryOp::CmpLeU: flipped = BinaryOp::CmpGtU; break;
        default: flipped = e->bin_op;
        }
        if (flipped != e->bin_op)
            return Expr::binary(flipped, e->a, e->b, e->type);
    }
    if (e && e->kind == ExprKind::Unary && e->un_op == UnaryOp::LogicalNot)
        return e->a;
    return Expr::unary(UnaryOp::LogicalNot, e, DataType::signed_int(32));
}

} // namespace ocldec
