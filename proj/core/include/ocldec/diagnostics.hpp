// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#ifndef OCLDEC_DIAGNOSTICS_HPP
#define OCLDEC_DIAGNOSTICS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace ocldec {

enum class Severity { Note, Warning, Error };

// One diagnostic message, tied to a line of the input listing when known.
// Rendered as "file:line: severity: message" (line 0 means no location).
struct Diagnostic {
    Severity severity = Severity::Note;
    int line = 0;
    std::string message;

    std::string render(const std::string &file) const;
};

// Collects diagnostics produced while processing one listing. Passed by
// reference through the pipeline; never owns the input file name (the CLI
// attaches it on rendering).
class DiagnosticSink {
public:
    void note(int line, std::string message);
    void warning(int line, std::string message);
    void error(int line, std::string message);

    const std::vector<Diagnostic> &all() const { return diags_; }
    bool has_errors() const { return error_count_ > 0; }
    int error_count() const { return error_count_; }

private:
    std::vector<Diagnostic> diags_;
    int error_count_ = 0;
};

// Thrown for malformed input that makes the current kernel unprocessable
// (unbalanced brackets, .text before .kernel, undefined branch target).
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string &message)
        : std::runtime_error(message), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

} // namespace ocldec

#endif
