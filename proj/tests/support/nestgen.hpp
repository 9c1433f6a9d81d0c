// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
// Random nested control structure generator. Each nest is emitted as a
// listing in one of the branch layouts the structurizer understands, along
// with the ground-truth nesting, so a reduction can be checked for shape
// isomorphism without caring how blocks were split.

#ifndef OCLDEC_TESTS_NESTGEN_HPP
#define OCLDEC_TESTS_NESTGEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ocldec/structurizer.hpp"

namespace ocldec_tests {

// Branch layouts the generator draws from.
enum NestStyle : unsigned {
    kStyleSccIf = 1u << 0,       // uniform branch over the body
    kStyleSccDiamond = 1u << 1,  // uniform if-else
    kStyleMaskBypass = 1u << 2,  // saveexec + execz bypass, no else
    kStyleMaskPlain = 1u << 3,   // saveexec, body, restore; no jumps
    kStyleMaskForm1 = 1u << 4,   // bypass + invert-only block + skip
    kStyleMaskForm2 = 1u << 5,   // else body inside the inversion block
    kStyleMaskForm3 = 1u << 6,   // no bypass, invert-only block + skip
};

// Control-shape tree: one node per conditional, in source order. Straight
// line code does not appear; that is the point of the comparison.
struct SkelNode {
    bool has_else = false;
    std::vector<SkelNode> then_body;
    std::vector<SkelNode> else_body;
};

bool skel_equal(const std::vector<SkelNode> &a, const std::vector<SkelNode> &b);

// Extracts the control shape of a reduced region tree.
std::vector<SkelNode> skeleton_of(const ocldec::Region *root);

struct NestSpec {
    std::string listing;        // complete one-kernel listing
    std::vector<SkelNode> shape;
    unsigned styles_used = 0;   // NestStyle bits
    int conditionals = 0;
};

// Deterministic generation: same seed, same nest. Depth is capped at 6
// and the emitted code stays within 60 basic blocks.
NestSpec make_nest(uint64_t seed);

} // namespace ocldec_tests

#endif
