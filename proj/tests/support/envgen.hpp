// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
// Deterministic sampling of execution environments for differential runs.

#ifndef OCLDEC_TESTS_ENVGEN_HPP
#define OCLDEC_TESTS_ENVGEN_HPP

#include <cstdint>
#include <vector>

#include "ocldec/asm_frontend.hpp"
#include "ocldec/oracle.hpp"

namespace ocldec_tests {

// Draws `count` environments for the given kernel. The work-group size is
// taken from the config verbatim (listings bake it into shift constants);
// everything else is randomized from the seed: group coordinates, local
// coordinates, global offsets, scalar argument values, and distinct aligned
// base addresses for pointer arguments.
std::vector<ocldec::OracleEnv> sample_envs(const ocldec::KernelConfig &config, size_t count,
                                           uint64_t seed);

} // namespace ocldec_tests

#endif
