// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
// Region-based control structure recovery: basic blocks become leaf
// regions, then linear chains, if-then and if-then-else shapes are merged
// iteratively in reverse-postorder until one region (or an irreducible
// residue) remains.

#ifndef OCLDEC_STRUCTURIZER_HPP
#define OCLDEC_STRUCTURIZER_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ocldec/cfg.hpp"
#include "ocldec/diagnostics.hpp"

namespace ocldec {

enum class RegionKind : uint8_t { Block, Linear, IfThen, IfElse };

// How an if condition is recovered at lowering time.
struct CondSpec {
    CondCode cc = CondCode::Scc1;
    Operand mask_source; // Masked conditions: saved-mask source operand
    bool then_is_taken = false; // then arm reached via the taken edge
};

struct Region {
    int id = 0;
    RegionKind kind = RegionKind::Block;
    int block_id = -1; // Block leaves

    // Linear: children in execution order.
    // IfThen: [header, then] (+ join last when absorbed).
    // IfElse: [header, then, else] (+ join last when absorbed).
    std::vector<Region *> children;
    bool join_absorbed = false;
    CondSpec cond;      // IfThen/IfElse
    int join_block = -1; // entry block of the join point, -1 if none

    bool is_leaf() const { return kind == RegionKind::Block; }
    // Entry basic block of this region (recurses into the header).
    int entry_block() const;
};

// One reduction event: `absorbed` lists the merged regions in structural
// order (header first), `result` is the id of the replacement region.
struct MergeRecord {
    RegionKind kind = RegionKind::Linear;
    std::vector<int> absorbed;
    int result = 0;
};

class RegionGraph {
public:
    // Builds leaf regions from the reachable, non-absorbed blocks of a
    // normalized flow graph, copying its edges.
    static RegionGraph from_cfg(const Cfg &cfg);

    // Synthetic construction for reducer tests: blocks first, then edges.
    Region *add_block(int block_id);
    void add_edge(Region *from, Region *to);
    void set_entry(Region *r) { entry_ = r->id; }

    Region *entry() const;
    const std::vector<Region *> &live_regions() const { return live_; }
    const std::vector<int> &succs(int region_id) const;
    const std::vector<int> &preds(int region_id) const;
    Region *region(int id) const;

    // Terminator of a basic block, when the graph was built from a flow
    // graph. Synthetic graphs have none; matchers then go by shape alone.
    const Terminator *block_term(int block_id) const;

    // Reverse postorder over the current top-level regions.
    std::vector<Region *> rpo() const;

    friend struct Reducer;

private:
    Region *make_region(RegionKind kind);
    void replace(const std::vector<int> &old_ids, Region *merged);

    std::vector<std::unique_ptr<Region>> arena_;
    std::vector<Region *> live_; // current top-level regions, id order
    std::vector<std::vector<int>> succs_, preds_;
    std::map<int, Terminator> block_terms_;
    int entry_ = -1;
    int next_id_ = 1; // region ids are 1-based to match block numbering
};

struct ReduceResult {
    Region *root = nullptr;          // single region when fully reduced
    std::vector<Region *> residue;   // top-level regions when not
    std::vector<MergeRecord> merges; // every event, in order
    std::vector<std::string> dumps;  // DOT snapshot per step when requested
    bool reduced = false;
};

struct ReduceOptions {
    bool record_dumps = false;
};

// Rewrites the three exec-mask if-else layouts and the masked plain-if
// into ordinary conditional diamonds: mask bookkeeping instructions are
// suppressed, shared blocks are split at the invert point (the fake
// label/jump insertion), and the header terminator becomes a Masked
// conditional on the saved source. Returns the number of rewrites.
int normalize_if_else(Cfg &cfg, DiagnosticSink &sink);

// Matchers, applied in this order at each node of the RPO scan. Each
// returns the merged region or null.
Region *match_if_else(RegionGraph &graph, Region *r);
Region *match_if(RegionGraph &graph, Region *r);
Region *match_linear(RegionGraph &graph, Region *r);

// Runs the matchers to a fixed point. Deterministic: the scan order is
// reverse postorder, region ids increase monotonically, and the first
// applicable match wins.
ReduceResult reduce(RegionGraph &graph, const ReduceOptions &opts = {});

// v_cndmask_b32 dst, src0, src1, cc: the single-instruction conditional.
// Exposed as a predicate; the symbolic stepper builds the ternary.
struct TernaryInfo {
    unsigned dst = 0;
    Operand src0, src1, cond;
};
std::optional<TernaryInfo> detect_ternary(const Instruction &ins);

// DOT rendering of the current region graph.
std::string region_graph_dot(const RegionGraph &graph, const std::string &name);

} // namespace ocldec

#endif
