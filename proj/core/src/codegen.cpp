// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/codegen.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "ocldec/type_recovery.hpp"

namespace ocldec {

namespace {

// C operator precedence, high binds tight. Anything at or above kPrimary
// never needs parentheses.
constexpr int kPrimary = 16;
constexpr int kUnary = 14;

int binop_prec(BinaryOp op) {
    switch (op) {
    case BinaryOp::Mul:
    case BinaryOp::Div: return 13;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 12;
    case BinaryOp::Shl:
    case BinaryOp::LShr:
    case BinaryOp::AShr: return 11;
    case BinaryOp::CmpLt:
    case BinaryOp::CmpLe:
    case BinaryOp::CmpGt:
    case BinaryOp::CmpGe:
    case BinaryOp::CmpLtU:
    case BinaryOp::CmpLeU:
    case BinaryOp::CmpGtU:
    case BinaryOp::CmpGeU: return 9;
    case BinaryOp::CmpEq:
    case BinaryOp::CmpNe: return 8;
    case BinaryOp::And: return 7;
    case BinaryOp::Xor: return 6;
    case BinaryOp::Or: return 5;
    default: return kPrimary; // rendered as calls
    }
}

const char *binop_text(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::And: return "&";
    case BinaryOp::Or: return "|";
    case BinaryOp::Xor: return "^";
    case BinaryOp::Shl: return "<<";
    case BinaryOp::LShr:
    case BinaryOp::AShr: return ">>";
    case BinaryOp::CmpEq: return "==";
    case BinaryOp::CmpNe: return "!=";
    case BinaryOp::CmpLt:
    case BinaryOp::CmpLtU: return "<";
    case BinaryOp::CmpLe:
    case BinaryOp::CmpLeU: return "<=";
    case BinaryOp::CmpGt:
    case BinaryOp::CmpGtU: return ">";
    case BinaryOp::CmpGe:
    case BinaryOp::CmpGeU: return ">=";
    default: return "?";
    }
}

bool op_wants_unsigned(BinaryOp op) {
    switch (op) {
    case BinaryOp::CmpLtU:
    case BinaryOp::CmpLeU:
    case BinaryOp::CmpGtU:
    case BinaryOp::CmpGeU:
    case BinaryOp::LShr:
    case BinaryOp::MulHi:
        return true;
    default:
        return false;
    }
}

bool op_wants_signed(BinaryOp op) {
    switch (op) {
    case BinaryOp::CmpLt:
    case BinaryOp::CmpLe:
    case BinaryOp::CmpGt:
    case BinaryOp::CmpGe:
    case BinaryOp::AShr:
    case BinaryOp::MulHiS:
        return true;
    default:
        return false;
    }
}

std::string render(const Expr *e, int min_prec);

std::string render_const(const Expr *e) {
    std::ostringstream os;
    if (e->type.is_float()) {
        // A float-typed constant is a bit pattern; print the value when it
        // round-trips cleanly, the reinterpret form otherwise.
        if (e->type.bits == 32) {
            uint32_t bits = uint32_t(e->const_value);
            float f;
            std::memcpy(&f, &bits, sizeof f);
            if (std::isfinite(f) && f == std::floor(f) && std::fabs(f) < 1e6f) {
                os << (long long)(f) << ".0f";
                return os.str();
            }
            os << "as_float(0x" << std::hex << bits << "u)";
            return os.str();
        }
    }
    const bool neg32 = e->type.is_signed() && e->type.bits == 32 && (e->const_value >> 31) == 1;
    if (neg32) {
        os << int32_t(uint32_t(e->const_value));
        return os.str();
    }
    if (e->const_value < 4096) {
        os << e->const_value;
    } else {
        os << "0x" << std::hex << e->const_value;
    }
    if (e->type.bits == 64 && e->const_value > 0xffffffffull)
        os << "ul";
    return os.str();
}

// Renders an operand of `op`, casting when the printed type disagrees with
// the operator's signedness. Only then: unsigned-by-default machine values
// would otherwise drown the output in casts.
std::string render_sign_aware(const ExprPtr &child, BinaryOp op, int min_prec) {
    bool cast_unsigned = false, cast_signed = false;
    if (op_wants_unsigned(op) && child->type.is_signed())
        cast_unsigned = true;
    if (op_wants_signed(op) && !child->type.is_signed() && !child->type.is_float())
        cast_signed = true;
    if (!cast_unsigned && !cast_signed)
        return render(child.get(), min_prec);
    std::ostringstream os;
    os << '(' << (cast_unsigned ? (child->type.bits == 64 ? "ulong" : "uint")
                                : (child->type.bits == 64 ? "long" : "int"))
       << ')' << render(child.get(), kUnary);
    return os.str();
}

// True when the cast between these types reinterprets float bits as
// integer bits or back; OpenCL spells that as_float/as_int/as_uint.
bool is_bit_reinterpret(DataType from, DataType to) {
    return from.bits == to.bits && from.is_float() != to.is_float() && !from.is_pointer() &&
           !to.is_pointer();
}

std::string cast_name(DataType to) {
    if (to.is_float())
        return to.bits == 64 ? "as_double" : "as_float";
    return to.bits == 64 ? "as_ulong" : (to.is_signed() ? "as_int" : "as_uint");
}

// Element count an index expression advances over, for `base[index]`
// recovery: strips the multiply/shift that scales by the element size.
// Returns null when the term is not a clean multiple.
ExprPtr unscale_term(const ExprPtr &term, uint32_t elem_size) {
    if (elem_size == 1)
        return term;
    if (term->kind == ExprKind::Unary && term->un_op == UnaryOp::Cast && term->a)
        if (ExprPtr inner = unscale_term(term->a, elem_size))
            return inner;
    if (term->is_const() && term->const_value % elem_size == 0)
        return Expr::constant(term->const_value / elem_size, term->type);
    if (term->kind != ExprKind::Binary)
        return nullptr;
    if (term->bin_op == BinaryOp::Shl && term->b && term->b->is_const() &&
        term->b->const_value < 32 && (uint64_t(1) << term->b->const_value) == elem_size)
        return term->a;
    if (term->bin_op == BinaryOp::Mul) {
        if (term->b && term->b->is_const() && term->b->const_value == elem_size)
            return term->a;
        if (term->a && term->a->is_const() && term->a->const_value == elem_size)
            return term->b;
    }
    return nullptr;
}

const Expr *strip_casts(const Expr *e) {
    while (e && e->kind == ExprKind::Unary && e->un_op == UnaryOp::Cast)
        e = e->a.get();
    return e;
}

// base[index] recovery for a byte address: finds a pointer-typed argument
// among the addends and divides the rest by the element size.
bool render_indexed(const ExprPtr &addr, DataType elem, std::string &out) {
    std::vector<ExprPtr> terms;
    collect_add_terms(addr, terms);

    ExprPtr base;
    std::vector<ExprPtr> rest;
    for (const ExprPtr &t : terms) {
        const Expr *bare = strip_casts(t.get());
        if (!base && bare->kind == ExprKind::KernelArg && bare->type.is_pointer() &&
            bare->type.pointee().byte_size() == elem.byte_size()) {
            base = t;
            continue;
        }
        rest.push_back(t);
    }
    if (!base)
        return false;

    const uint32_t size = elem.byte_size();
    ExprPtr index;
    for (const ExprPtr &t : rest) {
        ExprPtr part = unscale_term(t, size);
        if (!part)
            return false;
        index = index ? Expr::binary(BinaryOp::Add, index, part, part->type) : part;
    }

    const Expr *bare = strip_casts(base.get());
    std::ostringstream os;
    os << bare->name << '[' << (index ? render(index.get(), 0) : "0") << ']';
    out = os.str();
    return true;
}

const char *space_name(AddressSpace space) {
    switch (space) {
    case AddressSpace::Global: return "__global ";
    case AddressSpace::Local: return "__local ";
    case AddressSpace::Constant: return "__constant ";
    case AddressSpace::Private: return "";
    case AddressSpace::None: return "";
    }
    return "";
}

std::string render_deref(const Expr *e) {
    DataType elem = e->type;
    std::string indexed;
    if (render_indexed(e->a, elem, indexed))
        return indexed;
    DataType value_type = elem;
    value_type.addr_space = AddressSpace::None;
    std::ostringstream os;
    os << "*((" << space_name(elem.addr_space) << render_type(value_type) << " *)"
       << render(e->a.get(), kUnary) << ')';
    return os.str();
}

std::string render(const Expr *e, int min_prec) {
    if (!e)
        return "0 /* missing */";
    std::ostringstream os;
    int prec = kPrimary;

    switch (e->kind) {
    case ExprKind::Const:
        os << render_const(e);
        break;
    case ExprKind::Builtin:
        os << builtin_name(e->builtin.fn) << '(';
        if (e->builtin.fn != BuiltinFn::WorkDim)
            os << e->builtin.dim;
        os << ')';
        break;
    case ExprKind::KernelArg:
    case ExprKind::Var:
        os << e->name;
        break;
    case ExprKind::KernargBase:
        os << "__settings_base";
        break;

    case ExprKind::Unary:
        switch (e->un_op) {
        case UnaryOp::LogicalNot:
            prec = kUnary;
            os << '!' << render(e->a.get(), kUnary);
            break;
        case UnaryOp::BitNot:
            prec = kUnary;
            os << '~' << render(e->a.get(), kUnary);
            break;
        case UnaryOp::Neg:
            prec = kUnary;
            os << '-' << render(e->a.get(), kUnary);
            break;
        case UnaryOp::Lo32:
            prec = kUnary;
            os << "(uint)" << render(e->a.get(), kUnary);
            break;
        case UnaryOp::Hi32:
            os << "(uint)(" << render(e->a.get(), 11) << " >> 32)";
            prec = kUnary;
            break;
        case UnaryOp::Cast:
            if (e->a && is_bit_reinterpret(e->a->type, e->type)) {
                os << cast_name(e->type) << '(' << render(e->a.get(), 0) << ')';
            } else {
                prec = kUnary;
                DataType t = e->type;
                t.addr_space = AddressSpace::None;
                os << '(' << render_type(t) << ')' << render(e->a.get(), kUnary);
            }
            break;
        }
        break;

    case ExprKind::Binary: {
        if (e->bin_op == BinaryOp::MulHi || e->bin_op == BinaryOp::MulHiS) {
            os << "mul_hi(" << render_sign_aware(e->a, e->bin_op, 0) << ", "
               << render_sign_aware(e->b, e->bin_op, 0) << ')';
            break;
        }
        if (e->bin_op == BinaryOp::Concat64) {
            os << "upsample(" << render(e->b.get(), 0) << ", " << render(e->a.get(), 0) << ')';
            break;
        }
        prec = binop_prec(e->bin_op);
        // Left operand keeps the operator's precedence (left associative);
        // the right needs one step tighter.
        os << render_sign_aware(e->a, e->bin_op, prec) << ' ' << binop_text(e->bin_op) << ' '
           << render_sign_aware(e->b, e->bin_op, prec + 1);
        break;
    }

    case ExprKind::Ternary:
        prec = 3;
        os << render(e->a.get(), 4) << " ? " << render(e->b.get(), 3) << " : "
           << render(e->c.get(), 3);
        break;

    case ExprKind::Deref:
        os << render_deref(e);
        break;
    }

    std::string text = os.str();
    if (prec < min_prec)
        return "(" + text + ")";
    return text;
}

} // namespace

std::string render_expr(const ExprPtr &e) { return render(e.get(), 0); }

std::string emit_fallback(const std::string &source_text) {
    std::string trimmed = source_text;
    const size_t first = trimmed.find_first_not_of(" \t");
    const size_t last = trimmed.find_last_not_of(" \t");
    if (first == std::string::npos) {
        trimmed.clear();
    } else {
        trimmed = trimmed.substr(first, last - first + 1);
    }
    std::ostringstream os;
    os << "__asm volatile (\"" << trimmed << "\");";
    return os.str();
}

std::string emit_fallback(const Instruction &ins) { return emit_fallback(ins.source_text); }

namespace {

void emit_statement(std::ostringstream &os, const Stmt &s, int depth);

void emit_body(std::ostringstream &os, const std::vector<Stmt> &body, int depth) {
    for (const Stmt &s : body)
        emit_statement(os, s, depth);
}

std::string indent(int depth) { return std::string(size_t(depth) * 4, ' '); }

// The stored bits are reinterpreted, not converted, when value and target
// disagree on float-ness.
std::string render_store_value(const ExprPtr &value, DataType elem) {
    if (value && is_bit_reinterpret(value->type, elem))
        return cast_name(elem) + ('(' + render_expr(value) + ')');
    return render_expr(value);
}

void emit_statement(std::ostringstream &os, const Stmt &s, int depth) {
    switch (s.kind) {
    case StmtKind::Basic: {
        const Statement &st = s.base;
        switch (st.kind) {
        case StatementKind::Assign:
            os << indent(depth) << st.name << " = " << render_expr(st.value) << ";\n";
            break;
        case StatementKind::Decl: {
            DataType t = st.decl_type;
            t.addr_space = AddressSpace::None;
            os << indent(depth) << render_type(t) << ' ' << st.name;
            if (st.value)
                os << " = " << render_expr(st.value);
            os << ";\n";
            break;
        }
        case StatementKind::Store: {
            ExprPtr target = Expr::deref(st.addr, st.elem_type, st.space);
            os << indent(depth) << render_expr(target) << " = "
               << render_store_value(st.value, st.elem_type) << ";\n";
            break;
        }
        case StatementKind::RawAsm:
            os << indent(depth) << emit_fallback(st.text) << "\n";
            break;
        }
        break;
    }
    case StmtKind::If:
        os << indent(depth) << "if (" << render_expr(s.cond) << ") {\n";
        emit_body(os, s.then_body, depth + 1);
        if (!s.else_body.empty()) {
            os << indent(depth) << "} else {\n";
            emit_body(os, s.else_body, depth + 1);
        }
        os << indent(depth) << "}\n";
        break;
    case StmtKind::Label:
        os << s.label << ":;\n";
        break;
    case StmtKind::Goto:
        if (s.cond)
            os << indent(depth) << "if (" << render_expr(s.cond) << ") goto " << s.label
               << ";\n";
        else
            os << indent(depth) << "goto " << s.label << ";\n";
        break;
    }
}

} // namespace

std::string emit_kernel(const KernelConfig &config, const LoweredBody &body,
                        const CodegenOptions &) {
    std::ostringstream os;
    os << "__kernel void " << config.name << '(';
    bool first = true;
    for (const ArgDecl &arg : config.args) {
        if (arg.is_implicit)
            continue;
        if (!first)
            os << ", ";
        first = false;
        std::string t = render_type(arg.type);
        os << t;
        if (!t.empty() && t.back() != '*')
            os << ' ';
        os << arg.name;
    }
    os << ") {\n";
    emit_body(os, body.stmts, 1);
    os << "}\n";
    return os.str();
}

} // namespace ocldec
