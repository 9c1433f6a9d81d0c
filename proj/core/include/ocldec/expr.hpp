// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#ifndef OCLDEC_EXPR_HPP
#define OCLDEC_EXPR_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ocldec/type_recovery.hpp"

namespace ocldec {

// Work-item builtin functions recoverable from the kernel setup code.
enum class BuiltinFn : uint8_t {
    GlobalId,
    LocalId,
    GroupId,
    GlobalSize,
    LocalSize,
    NumGroups,
    GlobalOffset,
    WorkDim,
};

struct BuiltinId {
    BuiltinFn fn = BuiltinFn::GlobalId;
    int dim = 0; // 0..2; ignored for WorkDim

    bool operator==(const BuiltinId &) const = default;
};

const char *builtin_name(BuiltinFn fn);

enum class ExprKind : uint8_t {
    Const,    // 64-bit raw payload, interpreted per type
    Builtin,  // get_global_id(0), ...
    KernelArg, // named kernel argument
    KernargBase, // the settings/kernarg base pointer itself (rarely leaks)
    Var,      // join variable introduced at a control-flow merge
    Unary,
    Binary,
    Ternary,  // cond ? a : b
    Deref,    // *(space type *)(addr)
};

enum class UnaryOp : uint8_t {
    LogicalNot,
    BitNot,
    Neg,
    Lo32,   // low dword of a 64-bit value
    Hi32,   // high dword of a 64-bit value
    Cast,   // value converted/reinterpreted to the node's type
};

enum class BinaryOp : uint8_t {
    Add,
    Sub,
    Mul,
    MulHi,  // high half of the widened unsigned product
    MulHiS, // high half of the widened signed product
    Div,
    And,
    Or,
    Xor,
    Shl,
    LShr,
    AShr,
    Concat64, // (lo:32, hi:32) -> 64
    // Ordered comparisons carry their signedness so evaluation stays
    // exact; both flavors render as the same C operator (with a cast when
    // the printed operand type disagrees).
    CmpEq,
    CmpNe,
    CmpLt,
    CmpLe,
    CmpGt,
    CmpGe,
    CmpLtU,
    CmpLeU,
    CmpGtU,
    CmpGeU,
};

bool is_comparison(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression node. Nodes are built through the static factories,
// which do light algebraic cleanup (x+0, x*1, constant folding on 32-bit
// unsigned arithmetic) so recovered indices read the way a human would
// write them.
struct Expr {
    ExprKind kind;
    DataType type;

    uint64_t const_value = 0;  // Const
    BuiltinId builtin{};       // Builtin
    std::string name;          // KernelArg, Var
    UnaryOp un_op{};           // Unary
    BinaryOp bin_op{};         // Binary
    ExprPtr a, b, c;           // operands (a=cond for Ternary)

    static ExprPtr constant(uint64_t value, DataType type);
    static ExprPtr c32(uint32_t value);
    static ExprPtr c64(uint64_t value);
    static ExprPtr builtin_ref(BuiltinId id, DataType type);
    static ExprPtr arg_ref(std::string name, DataType type);
    static ExprPtr kernarg_base();
    static ExprPtr var_ref(std::string name, DataType type);
    static ExprPtr unary(UnaryOp op, ExprPtr a, DataType type);
    static ExprPtr binary(BinaryOp op, ExprPtr a, ExprPtr b, DataType type);
    static ExprPtr ternary(ExprPtr cond, ExprPtr a, ExprPtr b, DataType type);
    static ExprPtr deref(ExprPtr addr, DataType pointee, AddressSpace space);

    bool is_const() const { return kind == ExprKind::Const; }
    bool is_const(uint64_t v) const { return kind == ExprKind::Const && const_value == v; }
    bool is_builtin(BuiltinFn fn) const { return kind == ExprKind::Builtin && builtin.fn == fn; }
    bool is_builtin(BuiltinFn fn, int dim) const {
        return kind == ExprKind::Builtin && builtin.fn == fn && builtin.dim == dim;
    }
};

// Deep structural equality (types included for Const width, ignored
// otherwise: two paths recovering the same value may disagree on sign
// before unification runs).
bool expr_equal(const ExprPtr &a, const ExprPtr &b);

// Flattens nested Add nodes into a term list; the inverse of repeated
// binary(Add, ...). Used by the builtin folds.
void collect_add_terms(const ExprPtr &e, std::vector<ExprPtr> &out);

// Logical negation for branch conditions: comparisons flip their operator,
// anything else is wrapped in LogicalNot.
ExprPtr negate_condition(const ExprPtr &e);

} // namespace ocldec

#endif
