// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/type_recovery.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace ocldec {

unsigned DataType::byte_size() const {
    if (is_pointer())
        return 8; // flat pointers are 64-bit
    switch (bits) {
    case 8: return 1;
    case 16: return 2;
    case 24:
    case 32: return 4;
    case 64: return 8;
    default: return 4;
    }
}

DataType DataType::pointee() const {
    DataType t = *this;
    if (t.pointer_depth > 0)
        --t.pointer_depth;
    if (t.pointer_depth == 0)
        t.addr_space = AddressSpace::None;
    return t;
}

DataType DataType::pointer_to(AddressSpace space) const {
    DataType t = *this;
    ++t.pointer_depth;
    t.addr_space = space;
    return t;
}

std::string TypeSuffix::text() const {
    std::ostringstream os;
    os << base << unsigned(bits);
    return os.str();
}

std::optional<TypeSuffix> parse_type_suffix(std::string_view token) {
    if (token.size() < 2 || token.size() > 3)
        return std::nullopt;
    char base = token[0];
    if (base != 'i' && base != 'u' && base != 'f' && base != 'b')
        return std::nullopt;
    std::string_view digits = token.substr(1);
    unsigned width = 0;
    for (char c : digits) {
        if (c < '0' || c > '9')
            return std::nullopt;
        width = width * 10 + unsigned(c - '0');
    }
    switch (width) {
    case 8:
    case 16:
    case 24:
    case 32:
    case 64:
        return TypeSuffix{base, uint8_t(width)};
    default:
        return std::nullopt;
    }
}

DataType type_from_suffix(const TypeSuffix &suffix) {
    switch (suffix.base) {
    case 'i': return DataType::signed_int(suffix.bits);
    case 'u': return DataType::unsigned_int(suffix.bits);
    case 'f': return DataType::float_type(suffix.bits);
    default: return DataType::binary(suffix.bits);
    }
}

UnifyResult unify(const DataType &first, const DataType &second) {
    UnifyResult r;
    if (first == second) {
        r.type = first;
        return r;
    }
    if (first.base == BaseType::Unknown) {
        r.type = second;
        return r;
    }
    if (second.base == BaseType::Unknown) {
        r.type = first;
        return r;
    }
    // Pointers unify with themselves only; a mismatch keeps the first
    // observation (there is no meaningful pointer lattice here).
    if (first.is_pointer() || second.is_pointer()) {
        r.type = first;
        r.sign_conflict = first.base != second.base || first.pointer_depth != second.pointer_depth;
        return r;
    }

    r.type = first;
    r.type.bits = std::max(first.bits, second.bits);
    r.width_conflict = first.bits != second.bits;

    if (first.base == second.base)
        return r;
    if (first.base == BaseType::Binary) {
        r.type.base = second.base; // binary yields to a typed partner
        return r;
    }
    if (second.base == BaseType::Binary)
        return r;
    // int vs uint vs float: first observation wins, flag it.
    r.sign_conflict = true;
    return r;
}

namespace {

struct NamedType {
    std::string_view name;
    DataType type;
};

// Machine type names as they appear in argument declarations. "structure"
// shows up for the driver's implicit printf buffer; it has no scalar
// meaning, so treat it as a byte blob.
constexpr std::array<NamedType, 13> kNamedTypes = {{
    {"char", {BaseType::SignedInt, 8, 0, AddressSpace::None}},
    {"uchar", {BaseType::UnsignedInt, 8, 0, AddressSpace::None}},
    {"short", {BaseType::SignedInt, 16, 0, AddressSpace::None}},
    {"ushort", {BaseType::UnsignedInt, 16, 0, AddressSpace::None}},
    {"int", {BaseType::SignedInt, 32, 0, AddressSpace::None}},
    {"uint", {BaseType::UnsignedInt, 32, 0, AddressSpace::None}},
    {"long", {BaseType::SignedInt, 64, 0, AddressSpace::None}},
    {"ulong", {BaseType::UnsignedInt, 64, 0, AddressSpace::None}},
    {"size_t", {BaseType::UnsignedInt, 64, 0, AddressSpace::None}},
    {"float", {BaseType::Float, 32, 0, AddressSpace::None}},
    {"double", {BaseType::Float, 64, 0, AddressSpace::None}},
    {"void", {BaseType::Void, 0, 0, AddressSpace::None}},
    {"structure", {BaseType::UnsignedInt, 8, 0, AddressSpace::None}},
}};

} // namespace

DataType type_from_arg_decl(std::string_view machine_type, AddressSpace space) {
    unsigned depth = 0;
    while (!machine_type.empty() && machine_type.back() == '*') {
        machine_type.remove_suffix(1);
        while (!machine_type.empty() && machine_type.back() == ' ')
            machine_type.remove_suffix(1);
        ++depth;
    }
    DataType t = DataType::unknown();
    for (const auto &entry : kNamedTypes) {
        if (entry.name == machine_type) {
            t = entry.type;
            break;
        }
    }
    for (unsigned i = 0; i < depth; ++i)
        t = t.pointer_to(space);
    return t;
}

std::string render_type(const DataType &type) {
    std::ostringstream os;
    if (type.is_pointer()) {
        switch (type.addr_space) {
        case AddressSpace::Global: os << "__global "; break;
        case AddressSpace::Local: os << "__local "; break;
        case AddressSpace::Constant: os << "__constant "; break;
        case AddressSpace::Private: os << "__private "; break;
        case AddressSpace::None: break;
        }
        os << render_type(type.pointee()) << ' ';
        for (unsigned i = 0; i < type.pointer_depth; ++i)
            os << '*';
        return os.str(); // "…int *": stars glue to the declared name
    }

    unsigned bits = type.bits == 24 ? 32 : type.bits;
    BaseType base = type.base;
    if (base == BaseType::Binary || base == BaseType::Unknown)
        base = BaseType::UnsignedInt;

    switch (base) {
    case BaseType::Void:
        return "void";
    case BaseType::Float:
        return bits == 64 ? "double" : "float";
    case BaseType::SignedInt:
        switch (bits) {
        case 8: return "char";
        case 16: return "short";
        case 64: return "long";
        default: return "int";
        }
    default:
        switch (bits) {
        case 8: return "uchar";
        case 16: return "ushort";
        case 64: return "ulong";
        default: return "uint";
        }
    }
}

} // namespace ocldec
