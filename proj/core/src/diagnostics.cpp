// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/diagnostics.hpp"

#include <sstream>

namespace ocldec {

static const char *severity_name(Severity s) {
    switch (s) {
    case Severity::Note: return "note";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
    }
    return "note";
}

std::string Diagnostic::render(const std::string &file) const {
    std::ostringstream os;
    os << file << ':' << line << ": " << severity_name(severity) << ": " << message;
    return os.str();
}

void DiagnosticSink::note(int line, std::string message) {
    diags_.push_back({Severity::Note, line, std::move(message)});
}

void DiagnosticSink::warning(int line, std::string message) {
    diags_.push_back({Severity::Warning, line, std::move(message)});
}

void DiagnosticSink::error(int line, std::string message) {
    diags_.push_back({Severity::Error, line, std::move(message)});
    ++error_count_;
}

} // namespace ocldec
