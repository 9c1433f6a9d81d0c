// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/asm_frontend.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace ocldec {

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

bool is_ident_char(char c) {
    return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '@';
}

std::string rtrim(std::string_view s) {
    size_t end = s.size();
    while (end > 0 && std::isspace(static_cast<unsigned char>(s[end - 1])))
        --end;
    return std::string(s.substr(0, end));
}

std::string_view ltrim_view(std::string_view s) {
    size_t begin = 0;
    while (begin < s.size() && std::isspace(static_cast<unsigned char>(s[begin])))
        ++begin;
    return s.substr(begin);
}

std::string trim(std::string_view s) { return rtrim(ltrim_view(s)); }

// Strips #, ; and single-line /* */ comments. Quoted strings (as in .arg
// type fields) are respected so a '#' inside quotes survives.
std::string strip_comments(std::string_view line) {
    std::string out;
    out.reserve(line.size());
    bool in_quotes = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '"')
            in_quotes = !in_quotes;
        if (!in_quotes) {
            if (c == '#' || c == ';')
                break;
            if (c == '/' && i + 1 < line.size() && line[i + 1] == '*') {
                size_t close = line.find("*/", i + 2);
                if (close == std::string_view::npos)
                    break; // unterminated: drop the rest of the line
                i = close + 1;
                continue;
            }
        }
        out.push_back(c);
    }
    return out;
}

// First whitespace-delimited word and the remainder.
std::pair<std::string_view, std::string_view> split_word(std::string_view s) {
    s = ltrim_view(s);
    size_t end = 0;
    while (end < s.size() && !std::isspace(static_cast<unsigned char>(s[end])))
        ++end;
    return {s.substr(0, end), ltrim_view(s.substr(end))};
}

// Splits on top-level commas; commas inside brackets, parens or quotes do
// not count. Empty trailing fields (CLRX emits ".arg data, ..., global,")
// are dropped.
std::vector<std::string> split_fields(std::string_view s) {
    std::vector<std::string> fields;
    std::string cur;
    int depth = 0;
    bool in_quotes = false;
    for (char c : s) {
        if (c == '"')
            in_quotes = !in_quotes;
        if (!in_quotes) {
            if (c == '[' || c == '(')
                ++depth;
            else if (c == ']' || c == ')')
                --depth;
            else if (c == ',' && depth == 0) {
                fields.push_back(trim(cur));
                cur.clear();
                continue;
            }
        }
        cur.push_back(c);
    }
    std::string last = trim(cur);
    if (!last.empty())
        fields.push_back(std::move(last));
    while (!fields.empty() && fields.back().empty())
        fields.pop_back();
    return fields;
}

std::optional<int64_t> parse_int(std::string_view token) {
    bool negative = false;
    if (!token.empty() && (token[0] == '-' || token[0] == '+')) {
        negative = token[0] == '-';
        token.remove_prefix(1);
    }
    if (token.empty())
        return std::nullopt;
    int base = 10;
    if (token.size() > 2 && token[0] == '0' && (token[1] == 'x' || token[1] == 'X')) {
        base = 16;
        token.remove_prefix(2);
    }
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value, base);
    if (ec != std::errc() || ptr != token.data() + token.size())
        return std::nullopt;
    int64_t v = static_cast<int64_t>(value);
    return negative ? -v : v;
}

struct SpecialName {
    std::string_view name;
    SpecialReg reg;
};

constexpr SpecialName kSpecialRegs[] = {
    {"exec", SpecialReg::Exec},     {"vcc", SpecialReg::Vcc},
    {"scc", SpecialReg::Scc},       {"m0", SpecialReg::M0},
    {"exec_lo", SpecialReg::ExecLo}, {"exec_hi", SpecialReg::ExecHi},
    {"vcc_lo", SpecialReg::VccLo},   {"vcc_hi", SpecialReg::VccHi},
};

// Parses s5 / v12 / s[4:7] / v[2:3]. Returns nullopt when the token is not
// register-shaped; throws ParseError for register syntax that is malformed
// or out of range (the caller downgrades to an opaque instruction).
std::optional<Operand> parse_register(const std::string &token, int line) {
    if (token.size() < 2 || (token[0] != 's' && token[0] != 'v'))
        return std::nullopt;
    const bool scalar = token[0] == 's';
    const unsigned limit = scalar ? 104 : 256;

    Operand op;
    op.kind = scalar ? OperandKind::SReg : OperandKind::VReg;
    op.text = token;

    std::string_view rest(token);
    rest.remove_prefix(1);
    if (rest[0] == '[') {
        if (rest.back() != ']')
            throw ParseError(line, "unbalanced bracket in register operand '" + token + "'");
        rest = rest.substr(1, rest.size() - 2);
        size_t colon = rest.find(':');
        if (colon == std::string_view::npos)
            throw ParseError(line, "register range without ':' in '" + token + "'");
        auto lo = parse_int(rest.substr(0, colon));
        auto hi = parse_int(rest.substr(colon + 1));
        if (!lo || !hi || *lo < 0 || *hi < *lo)
            throw ParseError(line, "bad register range '" + token + "'");
        op.first = unsigned(*lo);
        op.count = unsigned(*hi - *lo + 1);
    } else {
        auto idx = parse_int(rest);
        if (!idx)
            return std::nullopt; // "saveexec" and other identifiers
        if (*idx < 0)
            throw ParseError(line, "negative register index in '" + token + "'");
        op.first = unsigned(*idx);
        op.count = 1;
    }
    if (op.first + op.count > limit) {
        std::ostringstream os;
        os << "register '" << token << "' exceeds the " << (scalar ? "SGPR" : "VGPR")
           << " file (max " << (limit - 1) << ")";
        throw ParseError(line, os.str());
    }
    return op;
}

Operand parse_operand(const std::string &token, int line) {
    for (const auto &s : kSpecialRegs) {
        if (token == s.name) {
            Operand op;
            op.kind = OperandKind::Special;
            op.special = s.reg;
            op.count = (s.reg == SpecialReg::Exec || s.reg == SpecialReg::Vcc) ? 2 : 1;
            op.text = token;
            return op;
        }
    }
    if (auto reg = parse_register(token, line))
        return *reg;
    if (auto value = parse_int(token)) {
        Operand op;
        op.kind = OperandKind::Literal;
        op.value = *value;
        op.text = token;
        return op;
    }

    Operand op;
    op.text = token;
    const bool plain_ident =
        !token.empty() && is_ident_start(token[0]) &&
        std::all_of(token.begin(), token.end(), is_ident_char);
    op.kind = plain_ident ? OperandKind::Symbol : OperandKind::Annotation;
    return op;
}

} // namespace

std::vector<KernelSection> split_kernels(const std::string &listing) {
    enum class Mode { Preamble, Config, Text };

    std::vector<KernelSection> sections;
    Mode mode = Mode::Preamble;
    bool in_kernel = false;

    std::istringstream in(listing);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string text = rtrim(strip_comments(raw));
        if (trim(text).empty())
            continue;

        auto [word, rest] = split_word(text);
        if (word == ".kernel") {
            auto [name, extra] = split_word(rest);
            (void)extra;
            if (name.empty())
                throw ParseError(line_no, ".kernel directive without a name");
            KernelSection sec;
            sec.name = std::string(name);
            sec.line = line_no;
            sections.push_back(std::move(sec));
            in_kernel = true;
            mode = Mode::Preamble; // wait for .config / .text
            continue;
        }
        if (word == ".config") {
            if (!in_kernel)
                throw ParseError(line_no, ".config outside of a .kernel section");
            mode = Mode::Config;
            continue;
        }
        if (word == ".text") {
            if (!in_kernel)
                throw ParseError(line_no, ".text outside of a .kernel section");
            mode = Mode::Text;
            continue;
        }
        if (!in_kernel)
            continue; // preamble directives (.amd, .gpu, ...) are not ours

        SourceLine sl{line_no, std::move(text)};
        switch (mode) {
        case Mode::Config:
            sections.back().config_lines.push_back(std::move(sl));
            break;
        case Mode::Text:
            sections.back().text_lines.push_back(std::move(sl));
            break;
        case Mode::Preamble:
            // Directives between .kernel and .config/.text (rare) are
            // treated as config body; CLRX puts nothing else there.
            sections.back().config_lines.push_back(std::move(sl));
            break;
        }
    }
    return sections;
}

KernelConfig parse_config(const KernelSection &section, DiagnosticSink &sink) {
    KernelConfig config;
    config.name = section.name;

    for (const SourceLine &sl : section.config_lines) {
        auto [word, rest] = split_word(sl.text);
        std::string_view key = word;
        if (!key.empty() && key[0] == '.')
            key.remove_prefix(1);

        if (key == "dims") {
            auto [axes, extra] = split_word(rest);
            (void)extra;
            int dims = 0;
            bool ok = !axes.empty();
            for (char c : axes) {
                switch (std::tolower(static_cast<unsigned char>(c))) {
                case 'x': dims = std::max(dims, 1); break;
                case 'y': dims = std::max(dims, 2); break;
                case 'z': dims = std::max(dims, 3); break;
                default: ok = false;
                }
            }
            if (!ok)
                sink.error(sl.number, "bad .dims axes '" + std::string(axes) + "'");
            else
                config.dims = dims;
        } else if (key == "cws" || key == "reqd_work_group_size") {
            auto fields = split_fields(rest);
            if (fields.empty() || fields.size() > 3) {
                sink.error(sl.number, "cws expects 1 to 3 sizes");
                continue;
            }
            for (size_t i = 0; i < fields.size(); ++i) {
                auto v = parse_int(fields[i]);
                if (!v || *v <= 0) {
                    sink.error(sl.number, "bad cws value '" + fields[i] + "'");
                    break;
                }
                config.cws[i] = uint32_t(*v);
            }
        } else if (key == "sgprsnum" || key == "sgprnum") {
            auto v = parse_int(trim(rest));
            if (v && *v >= 0)
                config.sgprs = int(*v);
            else
                sink.error(sl.number, "bad sgprsnum value");
        } else if (key == "vgprsnum" || key == "vgprnum") {
            auto v = parse_int(trim(rest));
            if (v && *v >= 0)
                config.vgprs = int(*v);
            else
                sink.error(sl.number, "bad vgprsnum value");
        } else if (key == "useargs") {
            config.useargs = true;
        } else if (key == "arg") {
            auto fields = split_fields(rest);
            if (fields.size() < 3) {
                sink.error(sl.number, "arg directive needs name, type string and type");
                continue;
            }
            ArgDecl arg;
            arg.line = sl.number;
            arg.name = fields[0];
            arg.type_str = fields[1];
            if (arg.type_str.size() >= 2 && arg.type_str.front() == '"' && arg.type_str.back() == '"')
                arg.type_str = arg.type_str.substr(1, arg.type_str.size() - 2);
            arg.machine_type = fields[2];
            if (fields.size() > 3) {
                const std::string &space = fields[3];
                if (space == "global")
                    arg.space = AddressSpace::Global;
                else if (space == "local")
                    arg.space = AddressSpace::Local;
                else if (space == "constant")
                    arg.space = AddressSpace::Constant;
            } else if (arg.machine_type.find('*') != std::string::npos) {
                arg.space = AddressSpace::Global; // pointer with no explicit space
            }
            arg.type = type_from_arg_decl(arg.machine_type, arg.space);
            arg.is_implicit = arg.name.rfind("_.", 0) == 0;
            if (arg.type.is_unknown())
                sink.warning(sl.number, "unrecognized argument type '" + arg.machine_type +
                                            "' for '" + arg.name + "'");
            config.args.push_back(std::move(arg));
        } else {
            config.other_directives.push_back(sl);
        }
    }
    return config;
}

MnemonicParts decompose_mnemonic(std::string_view mnemonic) {
    MnemonicParts parts;

    size_t us = mnemonic.find('_');
    std::string_view head = us == std::string_view::npos ? mnemonic : mnemonic.substr(0, us);
    if (us != std::string_view::npos &&
        (head == "s" || head == "v" || head == "ds" || head == "flat")) {
        parts.prefix = std::string(head);
    } else {
        // Unknown families keep the whole name as the root so composition
        // round-trips.
        parts.prefix = "other";
        parts.root = std::string(mnemonic);
        return parts;
    }

    std::string_view rest = mnemonic.substr(head.size() + 1);
    std::vector<std::string_view> tokens;
    while (!rest.empty()) {
        size_t next = rest.find('_');
        tokens.push_back(rest.substr(0, next));
        if (next == std::string_view::npos)
            break;
        rest = rest.substr(next + 1);
    }

    // Peel at most two type suffixes off the tail; the root must keep at
    // least one token ("v_u32" is not a real mnemonic, but stay safe).
    size_t root_end = tokens.size();
    std::vector<TypeSuffix> peeled;
    while (root_end > 1 && peeled.size() < 2) {
        auto suffix = parse_type_suffix(tokens[root_end - 1]);
        if (!suffix)
            break;
        peeled.push_back(*suffix);
        --root_end;
    }
    std::reverse(peeled.begin(), peeled.end());
    parts.suffixes = std::move(peeled);

    std::string root;
    for (size_t i = 0; i < root_end; ++i) {
        if (i)
            root.push_back('_');
        root.append(tokens[i]);
    }
    parts.root = std::move(root);
    return parts;
}

std::string compose_mnemonic(const MnemonicParts &parts) {
    std::string out;
    if (parts.prefix != "other") {
        out = parts.prefix;
        out.push_back('_');
    }
    out += parts.root;
    for (const TypeSuffix &s : parts.suffixes) {
        out.push_back('_');
        out += s.text();
    }
    return out;
}

Instruction parse_instruction(const std::string &text, int line, DiagnosticSink &sink) {
    Instruction ins;
    ins.line = line;
    ins.source_text = trim(text);

    auto [word, rest] = split_word(ins.source_text);
    ins.mnemonic = std::string(word);
    ins.parts = decompose_mnemonic(ins.mnemonic);

    try {
        if (ins.mnemonic == "s_waitcnt") {
            // Counter arguments are space-separated ("vmcnt(0) lgkmcnt(0)");
            // keep the whole tail as one annotation.
            if (!rest.empty()) {
                Operand op;
                op.kind = OperandKind::Annotation;
                op.text = rtrim(rest);
                ins.operands.push_back(std::move(op));
            }
            return ins;
        }
        for (const std::string &field : split_fields(rest)) {
            // A field may carry trailing modifiers after spaces
            // ("v[0:1], v4 glc"): split again and parse each token.
            std::string_view remaining = field;
            bool first_token = true;
            while (!remaining.empty()) {
                auto [tok, tail] = split_word(remaining);
                if (tok.empty())
                    break;
                Operand op = parse_operand(std::string(tok), line);
                if (!first_token && op.kind == OperandKind::Symbol)
                    op.kind = OperandKind::Annotation; // "glc" after a register
                ins.operands.push_back(std::move(op));
                remaining = tail;
                first_token = false;
            }
        }
    } catch (const ParseError &err) {
        sink.warning(err.line(), std::string(err.what()) + "; keeping the line as inline assembly");
        ins.parse_failed = true;
        ins.parts = MnemonicParts{"other", ins.mnemonic.empty() ? ins.source_text : ins.mnemonic, {}};
        ins.operands.clear();
    }
    return ins;
}

std::vector<Instruction> parse_text(const KernelSection &section, DiagnosticSink &sink,
                                    std::vector<std::string> *trailing_labels) {
    std::vector<Instruction> instructions;
    std::vector<std::string> pending_labels;

    for (const SourceLine &sl : section.text_lines) {
        std::string_view text = ltrim_view(sl.text);

        // Peel any number of leading "name:" labels. The ':' inside a
        // register range is protected because a label name cannot contain
        // '[', so we only accept ':' that terminates an identifier.
        while (!text.empty() && is_ident_start(text[0])) {
            size_t end = 0;
            while (end < text.size() && is_ident_char(text[end]))
                ++end;
            if (end >= text.size() || text[end] != ':')
                break;
            pending_labels.emplace_back(text.substr(0, end));
            text = ltrim_view(text.substr(end + 1));
        }
        if (text.empty())
            continue;

        Instruction ins = parse_instruction(std::string(text), sl.number, sink);
        ins.labels = std::move(pending_labels);
        pending_labels.clear();
        instructions.push_back(std::move(ins));
    }

    if (trailing_labels)
        *trailing_labels = std::move(pending_labels);
    else if (!pending_labels.empty())
        sink.warning(section.text_lines.empty() ? section.line : section.text_lines.back().number,
                     "label after the last instruction");
    return instructions;
}

} // namespace ocldec
