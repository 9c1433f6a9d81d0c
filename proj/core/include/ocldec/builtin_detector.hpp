// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
// Pattern matchers that turn ABI loads and index arithmetic back into
// work-item builtin calls: get_global_id, get_num_groups, get_local_size.

#ifndef OCLDEC_BUILTIN_DETECTOR_HPP
#define OCLDEC_BUILTIN_DETECTOR_HPP

#include "ocldec/abi_model.hpp"
#include "ocldec/asm_frontend.hpp"
#include "ocldec/expr.hpp"
#include "ocldec/sym_state.hpp"

namespace ocldec {

// Resolves a scalar load at (offset, dwords) off the settings base to the
// value it carries: a builtin reference or a kernel argument reference.
// Null when the slot is unmapped.
ExprPtr match_settings_load(const AbiMap &abi, const KernelConfig &config, uint32_t offset,
                            unsigned dwords);

// group_id(d)*cws[d] + local_id(d)            -> global_id(d)
// group_id(d)*cws[d] + local_id(d) + goff(d)  -> global_id(d)
// (the variant without the offset term renders as global_id(d) - goff(d)
// once the driver-added offset is subtracted downstream; this fold only
// canonicalizes the sum). Extra addends survive around the folded core.
ExprPtr fold_global_id(const ExprPtr &e, const KernelConfig &config);

// global_size(d) / cws[d]   -> num_groups(d)
// global_size(d) >> log2(cws[d]) -> num_groups(d), power-of-two sizes only
ExprPtr fold_num_groups(const ExprPtr &e, const KernelConfig &config);

// group_id(d) * cws[d] -> group_id(d) * local_size(d). Off by default: the
// literal work-group size is usually what the reader wants to see.
ExprPtr fold_local_size(const ExprPtr &e, const KernelConfig &config);

// Applies every enabled fold bottom-up until a fixed point. Called at each
// materialization site (store addresses and values, branch conditions,
// join assignments).
ExprPtr fold_expr(const ExprPtr &e, const KernelConfig &config, const FoldOptions &opts);

} // namespace ocldec

#endif
