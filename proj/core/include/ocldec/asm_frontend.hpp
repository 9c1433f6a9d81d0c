// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
// Frontend for disassembled GCN kernel listings in the CLRX text format:
// .kernel/.config/.text sections, config directives (dims, cws, sgprsnum,
// vgprsnum, useargs, arg), labels, and instruction lines.

#ifndef OCLDEC_ASM_FRONTEND_HPP
#define OCLDEC_ASM_FRONTEND_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ocldec/diagnostics.hpp"
#include "ocldec/type_recovery.hpp"

namespace ocldec {

// One retained input line with its 1-based position in the original file.
struct SourceLine {
    int number = 0;
    std::string text; // comment-stripped, right-trimmed, non-blank
};

// The raw split of one .kernel section, before any parsing.
struct KernelSection {
    std::string name;
    int line = 0; // line of the .kernel directive
    std::vector<SourceLine> config_lines;
    std::vector<SourceLine> text_lines;
};

// One kernel argument from a .arg directive.
struct ArgDecl {
    std::string name;
    std::string type_str;     // the quoted OpenCL-facing spelling ("int*")
    std::string machine_type; // the third field ("int*", "long", ...)
    AddressSpace space = AddressSpace::None;
    DataType type;            // parsed from machine_type
    bool is_implicit = false; // driver-inserted args, names start with "_."
    int line = 0;
};

struct KernelConfig {
    std::string name;
    int dims = 1;
    std::array<uint32_t, 3> cws = {1, 1, 1}; // reqd work-group size, default 1,1,1
    int sgprs = 0;
    int vgprs = 0;
    bool useargs = false;
    std::vector<ArgDecl> args;
    std::vector<SourceLine> other_directives; // preserved verbatim

    uint32_t local_size(int dim) const { return cws[dim]; }
};

enum class OperandKind : uint8_t {
    SReg,    // s5 or s[4:7]: first + count
    VReg,    // v0 or v[2:3]
    Special, // exec, vcc, scc, m0 (and their _lo/_hi halves)
    Literal, // integer immediate, decimal or 0x hex
    Symbol,  // bare identifier: branch target or opaque modifier
    Annotation, // modifier-shaped token (offset:4, vmcnt(0), glc, ...)
};

enum class SpecialReg : uint8_t { Exec, Vcc, Scc, M0, ExecLo, ExecHi, VccLo, VccHi };

struct Operand {
    OperandKind kind = OperandKind::Annotation;
    unsigned first = 0; // SReg/VReg: first register index
    unsigned count = 1; // SReg/VReg: registers covered
    SpecialReg special = SpecialReg::Exec;
    int64_t value = 0;  // Literal
    std::string text;   // original token (always set)

    bool is_sreg() const { return kind == OperandKind::SReg; }
    bool is_vreg() const { return kind == OperandKind::VReg; }
    bool is_sreg(unsigned f, unsigned c) const {
        return kind == OperandKind::SReg && first == f && count == c;
    }
    bool is_special(SpecialReg r) const { return kind == OperandKind::Special && special == r; }
    bool is_literal() const { return kind == OperandKind::Literal; }
    bool is_literal(int64_t v) const { return kind == OperandKind::Literal && value == v; }
};

// Mnemonic split into prefix, root, and up to two trailing type suffixes.
// compose_mnemonic() reassembles the exact original spelling.
struct MnemonicParts {
    std::string prefix; // "s", "v", "ds", "flat", or "other"
    std::string root;   // never empty; "dwordx2" and such stay in the root
    std::vector<TypeSuffix> suffixes; // in source order, at most 2

    bool operator==(const MnemonicParts &) const = default;
};

struct Instruction {
    int line = 0;
    std::vector<std::string> labels; // labels attached in front of this instruction
    std::string source_text;         // trimmed instruction text, no labels
    std::string mnemonic;
    MnemonicParts parts;
    std::vector<Operand> operands;
    bool parse_failed = false; // malformed line kept as an opaque unit

    bool is(std::string_view m) const { return mnemonic == m; }
};

// Splits a listing into kernel sections. Preamble directives before the
// first .kernel are ignored; a .config/.text with no enclosing .kernel is a
// hard error. Comments (#, ;, single-line /* */) are stripped, lines are
// right-trimmed, and blank lines are dropped, so two listings differing
// only in whitespace split identically.
std::vector<KernelSection> split_kernels(const std::string &listing);

KernelConfig parse_config(const KernelSection &section, DiagnosticSink &sink);

// Parses one instruction line (no labels). Never throws: a malformed line
// comes back with parse_failed set and the original text preserved, so it
// can ride through to the inline-assembly fallback.
Instruction parse_instruction(const std::string &text, int line, DiagnosticSink &sink);

// Parses a section's .text lines: peels labels (an instruction may carry
// several), parses instructions. Labels trailing the last instruction are
// returned through *trailing_labels when non-null.
std::vector<Instruction> parse_text(const KernelSection &section, DiagnosticSink &sink,
                                    std::vector<std::string> *trailing_labels = nullptr);

MnemonicParts decompose_mnemonic(std::string_view mnemonic);
std::string compose_mnemonic(const MnemonicParts &parts);

} // namespace ocldec

#endif
