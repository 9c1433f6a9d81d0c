// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
// Command-line decompiler: GCN disassembly listing in, OpenCL C out.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ocldec/decompiler.hpp"

namespace {

bool read_file(const std::string &path, std::string &out, std::string &err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err = "cannot open '" + path + "' for reading";
        return false;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

// Writes through a temporary in the same directory and renames it over the
// target, so a failure partway never leaves a truncated output file.
bool write_file_atomic(const std::string &path, const std::string &content, std::string &err) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            err = "cannot open '" + tmp + "' for writing";
            return false;
        }
        out << content;
        out.flush();
        if (!out) {
            err = "write to '" + tmp + "' failed";
            std::remove(tmp.c_str());
            return false;
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        err = "cannot rename '" + tmp + "' to '" + path + "'";
        std::remove(tmp.c_str());
        return false;
    }
    return true;
}

std::string default_output(const std::string &input) {
    std::string stem = input;
    size_t slash = stem.find_last_of("/\\");
    size_t dot = stem.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        stem.resize(dot);
    return stem + ".cl";
}

// Dump files land next to the output: <stem>.<kernel>.cfg.dot and
// <stem>.<kernel>.step<N>.dot.
std::string dump_stem(const std::string &output_path, const std::string &kernel) {
    std::string stem = output_path;
    size_t slash = stem.find_last_of("/\\");
    size_t dot = stem.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        stem.resize(dot);
    return stem + "." + kernel;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Decompiles AMD GCN disassembly listings (CLRX syntax) to OpenCL C"};

    std::string input_path;
    std::string output_path;
    std::string only_kernel;
    std::string abi_map_path;
    bool dump_cfg = false;
    bool dump_regions = false;
    bool fold_local_size = false;

    app.add_option("input", input_path, "input listing (.asm, CLRX disassembler syntax)")
        ->required();
    app.add_option("-o,--output", output_path, "output file (default: input stem + .cl)");
    app.add_option("--kernel", only_kernel, "decompile only the named kernel");
    app.add_option("--abi-map", abi_map_path,
                   "settings-offset override file (offset:dwords = target lines)");
    app.add_flag("--dump-cfg", dump_cfg, "write the flow graph as Graphviz next to the output");
    app.add_flag("--dump-regions", dump_regions,
                 "write a Graphviz snapshot per structurizer step");
    app.add_flag("--fold-local-size", fold_local_size,
                 "rewrite work-group-size constants as get_local_size() calls");

    CLI11_PARSE(app, argc, argv);

    std::string err;
    std::string listing;
    if (!read_file(input_path, listing, err)) {
        std::cerr << "ocldec: error: " << err << "\n";
        return 1;
    }

    ocldec::DecompileOptions opts;
    opts.folds.fold_local_size = fold_local_size;
    opts.dump_cfg = dump_cfg;
    opts.dump_regions = dump_regions;
    if (!only_kernel.empty())
        opts.only_kernel = only_kernel;

    if (!abi_map_path.empty()) {
        std::string text;
        if (!read_file(abi_map_path, text, err)) {
            std::cerr << "ocldec: error: " << err << "\n";
            return 1;
        }
        ocldec::DiagnosticSink override_sink;
        opts.abi_overrides = ocldec::parse_abi_overrides(text, override_sink);
        for (const auto &d : override_sink.all())
            std::cerr << d.render(abi_map_path) << "\n";
        if (override_sink.has_errors())
            return 1;
    }

    ocldec::DecompileResult result = ocldec::decompile_listing(listing, opts);

    for (const auto &d : result.diagnostics.all())
        std::cerr << d.render(input_path) << "\n";

    if (result.kernels.empty()) {
        if (!result.diagnostics.has_errors())
            std::cerr << input_path << ":0: error: no kernels found\n";
        return 1;
    }

    bool any_failed = false;
    for (const auto &k : result.kernels)
        any_failed = any_failed || k.failed;

    if (output_path.empty())
        output_path = default_output(input_path);

    if (dump_cfg || dump_regions) {
        for (const auto &k : result.kernels) {
            const std::string stem = dump_stem(output_path, k.name);
            if (dump_cfg && !k.cfg_dot.empty() &&
                !write_file_atomic(stem + ".cfg.dot", k.cfg_dot, err)) {
                std::cerr << "ocldec: error: " << err << "\n";
                return 1;
            }
            for (size_t i = 0; i < k.reduction.dumps.size(); ++i) {
                std::ostringstream name;
                name << stem << ".step" << i << ".dot";
                if (!write_file_atomic(name.str(), k.reduction.dumps[i], err)) {
                    std::cerr << "ocldec: error: " << err << "\n";
                    return 1;
                }
            }
        }
    }

    if (!write_file_atomic(output_path, result.combined_source(), err)) {
        std::cerr << "ocldec: error: " << err << "\n";
        return 1;
    }

    return any_failed ? 1 : 0;
}
