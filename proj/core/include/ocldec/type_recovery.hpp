// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#ifndef OCLDEC_TYPE_RECOVERY_HPP
#define OCLDEC_TYPE_RECOVERY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ocldec {

struct ArgDecl; // asm_frontend.hpp

// Scalar base of a recovered type. Binary covers the b8..b64 instruction
// suffixes: bit-pattern data with no sign information yet. Unknown is the
// bottom element of unification.
enum class BaseType : uint8_t {
    Unknown,
    Binary,
    SignedInt,
    UnsignedInt,
    Float,
    Void,
};

enum class AddressSpace : uint8_t { None, Global, Local, Constant, Private };

// A recovered OpenCL-side type: scalar base + width in bits, optionally a
// pointer (pointer_depth > 0) into some address space. Widths follow the
// instruction suffixes, so 24 is a legal transient width; it widens to 32
// whenever the type is rendered as source text.
struct DataType {
    BaseType base = BaseType::Unknown;
    uint8_t bits = 32;
    uint8_t pointer_depth = 0;
    AddressSpace addr_space = AddressSpace::None;

    bool operator==(const DataType &) const = default;

    bool is_pointer() const { return pointer_depth > 0; }
    bool is_float() const { return base == BaseType::Float && !is_pointer(); }
    bool is_signed() const { return base == BaseType::SignedInt && !is_pointer(); }
    bool is_unknown() const { return base == BaseType::Unknown; }

    // Storage size of one element in bytes (24-bit widens to 4).
    unsigned byte_size() const;

    DataType pointee() const;
    DataType pointer_to(AddressSpace space) const;

    static DataType unknown() { return {}; }
    static DataType void_type() { return {BaseType::Void, 0, 0, AddressSpace::None}; }
    static DataType binary(uint8_t bits) { return {BaseType::Binary, bits, 0, AddressSpace::None}; }
    static DataType signed_int(uint8_t bits = 32) { return {BaseType::SignedInt, bits, 0, AddressSpace::None}; }
    static DataType unsigned_int(uint8_t bits = 32) { return {BaseType::UnsignedInt, bits, 0, AddressSpace::None}; }
    static DataType float_type(uint8_t bits = 32) { return {BaseType::Float, bits, 0, AddressSpace::None}; }
};

// One type suffix peeled off a mnemonic: a base letter (i, u, f, b) and a
// width. v_mul_hi_u32_u24 carries two of these, [u32, u24].
struct TypeSuffix {
    char base = 'b';
    uint8_t bits = 32;

    bool operator==(const TypeSuffix &) const = default;

    std::string text() const;
};

// Parses "u32", "i24", "f64", "b8"... Returns nullopt for anything else
// ("dwordx2" and friends are not type suffixes).
std::optional<TypeSuffix> parse_type_suffix(std::string_view token);

// Maps a suffix to the scalar type it implies: i -> signed, u -> unsigned,
// f -> float, b -> binary, width copied through.
DataType type_from_suffix(const TypeSuffix &suffix);

// Result of unifying two observations of the same value's type.
struct UnifyResult {
    DataType type;
    bool sign_conflict = false;  // kept the earlier signedness
    bool width_conflict = false; // kept the wider width
};

// Lattice join with first-observation-wins tie breaking:
//   - Unknown absorbs: unify(unknown, t) == t.
//   - Binary yields to any signed/unsigned/float partner of the same width.
//   - Sign conflicts (int vs uint) keep `first` and flag sign_conflict.
//   - Width conflicts keep the wider width and flag width_conflict.
// Idempotent: unify(t, t) == t with no flags.
UnifyResult unify(const DataType &first, const DataType &second);

// Parses a machine type name from a kernel argument declaration ("int",
// "uint*", "long", "float*", "structure*"...). Unrecognized names come back
// as Unknown so the caller can diagnose without losing the argument.
DataType type_from_arg_decl(std::string_view machine_type, AddressSpace space);

// Renders as OpenCL C: "int", "uint", "float", "long", "__global int *"...
// 24-bit widths render as 32; Binary renders as the unsigned of its width;
// Unknown renders as "uint" (callers diagnose separately).
std::string render_type(const DataType &type);

} // namespace ocldec

#endif
