// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/builtin_detector.hpp"

#include <algorithm>

namespace ocldec {

namespace {

std::string sanitize_arg_name(std::string name) {
    std::replace(name.begin(), name.end(), '.', '_');
    return name;
}

// Matches a builtin reference, optionally through the low-half extraction
// or a width cast a 64-bit slot picks up in 32-bit arithmetic.
bool match_builtin(const ExprPtr &e, BuiltinFn fn, int dim) {
    const Expr *p = e.get();
    while (p && p->kind == ExprKind::Unary &&
           (p->un_op == UnaryOp::Lo32 || p->un_op == UnaryOp::Cast))
        p = p->a.get();
    return p && p->kind == ExprKind::Builtin && p->builtin.fn == fn && p->builtin.dim == dim;
}

bool is_const_value(const ExprPtr &e, uint64_t v) {
    return e && e->is_const() && (e->const_value & 0xffffffffu) == (v & 0xffffffffu);
}

// group_id(d) * cws[d]: a multiply in either operand order, or a left
// shift when cws[d] is a power of two (what compilers actually emit).
// When cws[d] is 1 the multiply has already been simplified away and the
// bare group id counts. A local-size reference in place of the literal
// matches too.
bool match_group_product(const ExprPtr &e, const KernelConfig &config, int dim) {
    uint32_t cws = local_size(config, dim);
    if (cws == 1 && match_builtin(e, BuiltinFn::GroupId, dim))
        return true;
    if (!e || e->kind != ExprKind::Binary)
        return false;
    if (e->bin_op == BinaryOp::Shl) {
        return match_builtin(e->a, BuiltinFn::GroupId, dim) && e->b && e->b->is_const() &&
               e->b->const_value < 32 && (uint32_t(1) << e->b->const_value) == cws;
    }
    if (e->bin_op != BinaryOp::Mul)
        return false;
    const auto factor_matches = [&](const ExprPtr &f) {
        return is_const_value(f, cws) || match_builtin(f, BuiltinFn::LocalSize, dim);
    };
    if (match_builtin(e->a, BuiltinFn::GroupId, dim) && factor_matches(e->b))
        return true;
    if (match_builtin(e->b, BuiltinFn::GroupId, dim) && factor_matches(e->a))
        return true;
    return false;
}

ExprPtr rebuild_sum(const std::vector<ExprPtr> &terms, DataType type) {
    ExprPtr sum;
    for (const ExprPtr &t : terms)
        sum = sum ? Expr::binary(BinaryOp::Add, sum, t, type) : t;
    return sum;
}

} // namespace

ExprPtr match_settings_load(const AbiMap &abi, const KernelConfig &config, uint32_t offset,
                            unsigned dwords) {
    const AbiEntry *entry = abi.find(offset, dwords);
    if (!entry)
        return nullptr;
    if (entry->builtin) {
        DataType t = dwords == 2 ? DataType::unsigned_int(64) : DataType::unsigned_int(32);
        return Expr::builtin_ref(*entry->builtin, t);
    }
    if (entry->arg_index >= 0 && entry->arg_index < int(config.args.size())) {
        const ArgDecl &arg = config.args[entry->arg_index];
        return Expr::arg_ref(sanitize_arg_name(arg.name), entry->type);
    }
    return nullptr;
}

ExprPtr fold_global_id(const ExprPtr &e, const KernelConfig &config) {
    if (!e || e->kind != ExprKind::Binary || e->bin_op != BinaryOp::Add || e->type.bits != 32)
        return nullptr;
    std::vector<ExprPtr> terms;
    collect_add_terms(e, terms);
    if (terms.size() < 2)
        return nullptr;

    for (int dim = 0; dim < config.dims; ++dim) {
        int product = -1, local = -1, offset = -1;
        for (size_t i = 0; i < terms.size(); ++i) {
            if (product < 0 && match_group_product(terms[i], config, dim))
                product = int(i);
            else if (local < 0 && match_builtin(terms[i], BuiltinFn::LocalId, dim))
                local = int(i);
            else if (offset < 0 && match_builtin(terms[i], BuiltinFn::GlobalOffset, dim))
                offset = int(i);
        }
        if (product < 0 || local < 0)
            continue;

        DataType u32 = DataType::unsigned_int(32);
        ExprPtr gid = Expr::builtin_ref({BuiltinFn::GlobalId, dim}, u32);
        ExprPtr core =
            offset >= 0
                ? gid
                // The machine value omits the driver offset, so written as a
                // builtin it is get_global_id(d) - get_global_offset(d).
                : Expr::binary(BinaryOp::Sub, gid,
                               Expr::builtin_ref({BuiltinFn::GlobalOffset, dim}, u32), u32);

        std::vector<ExprPtr> rest{core};
        for (size_t i = 0; i < terms.size(); ++i)
            if (int(i) != product && int(i) != local && int(i) != offset)
                rest.push_back(terms[i]);
        return rebuild_sum(rest, e->type);
    }
    return nullptr;
}

ExprPtr fold_num_groups(const ExprPtr &e, const KernelConfig &config) {
    if (!e || e->kind != ExprKind::Binary)
        return nullptr;
    for (int dim = 0; dim < config.dims; ++dim) {
        if (!match_builtin(e->a, BuiltinFn::GlobalSize, dim))
            continue;
        uint32_t cws = local_size(config, dim);
        bool hit = false;
        if (e->bin_op == BinaryOp::Div && is_const_value(e->b, cws))
            hit = true;
        else if (e->bin_op == BinaryOp::LShr && e->b && e->b->is_const() &&
                 e->b->const_value < 32 && (uint32_t(1) << e->b->const_value) == cws)
            hit = true;
        if (hit)
            return Expr::builtin_ref({BuiltinFn::NumGroups, dim}, DataType::unsigned_int(32));
    }
    return nullptr;
}

ExprPtr fold_local_size(const ExprPtr &e, const KernelConfig &config) {
    if (!e || e->kind != ExprKind::Binary || e->bin_op != BinaryOp::Mul)
        return nullptr;
    for (int dim = 0; dim < config.dims; ++dim) {
        uint32_t cws = local_size(config, dim);
        if (cws == 1)
            continue;
        ExprPtr group, other;
        if (match_builtin(e->a, BuiltinFn::GroupId, dim)) {
            group = e->a;
            other = e->b;
        } else if (match_builtin(e->b, BuiltinFn::GroupId, dim)) {
            group = e->b;
            other = e->a;
        } else {
            continue;
        }
        if (is_const_value(other, cws))
            return Expr::binary(
                BinaryOp::Mul, group,
                Expr::builtin_ref({BuiltinFn::LocalSize, dim}, DataType::unsigned_int(32)),
                e->type);
    }
    return nullptr;
}

ExprPtr fold_expr(const ExprPtr &e, const KernelConfig &config, const FoldOptions &opts) {
    if (!e)
        return e;

    ExprPtr a = fold_expr(e->a, config, opts);
    ExprPtr b = fold_expr(e->b, config, opts);
    ExprPtr c = fold_expr(e->c, config, opts);

    ExprPtr cur = e;
    if (a != e->a || b != e->b || c != e->c) {
        switch (e->kind) {
        case ExprKind::Unary:
            cur = Expr::unary(e->un_op, a, e->type);
            break;
        case ExprKind::Binary:
            cur = Expr::binary(e->bin_op, a, b, e->type);
            break;
        case ExprKind::Ternary:
            cur = Expr::ternary(a, b, c, e->type);
            break;
        case ExprKind::Deref:
            cur = Expr::deref(a, e->type, e->type.addr_space);
            break;
        default:
            break; // leaves have no children to swap
        }
    }

    for (;;) {
        ExprPtr next = fold_global_id(cur, config);
        if (!next)
            next = fold_num_groups(cur, config);
        if (!next && opts.fold_local_size)
            next = fold_local_size(cur, config);
        if (!next)
            return cur;
        cur = next;
    }
}

} // namespace ocldec
