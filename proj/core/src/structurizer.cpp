// Copyright 2026 The ocldec Authors
//
// Licensed under the Apache License v2.0 with LLVM Exceptions.
// See https://llvm.org/LICENSE.txt for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception

#include "ocldec/structurizer.hpp"

#include <algorithm>
#include <sstream>

namespace ocldec {

int Region::entry_block() const {
    const Region *r = this;
    while (!r->is_leaf())
        r = r->children.front();
    return r->block_id;
}

namespace {

// Exit block of a region: the block whose terminator decides where control
// goes next. Undefined (-1) for two-exit shapes, which can never be the
// header of a further match anyway.
int exit_block(const Region *r) {
    switch (r->kind) {
    case RegionKind::Block:
        return r->block_id;
    case RegionKind::Linear:
        return exit_block(r->children.back());
    case RegionKind::IfThen:
    case RegionKind::IfElse:
        if (r->join_absorbed)
            return exit_block(r->children.back());
        return -1;
    }
    return -1;
}

} // namespace

Region *RegionGraph::make_region(RegionKind kind) {
    auto r = std::make_unique<Region>();
    r->id = next_id_++;
    r->kind = kind;
    arena_.push_back(std::move(r));
    succs_.resize(size_t(next_id_));
    preds_.resize(size_t(next_id_));
    return arena_.back().get();
}

Region *RegionGraph::add_block(int block_id) {
    Region *r = make_region(RegionKind::Block);
    r->block_id = block_id;
    live_.push_back(r);
    if (entry_ < 0)
        entry_ = r->id;
    return r;
}

void RegionGraph::add_edge(Region *from, Region *to) {
    std::vector<int> &s = succs_.at(size_t(from->id));
    if (std::find(s.begin(), s.end(), to->id) == s.end())
        s.push_back(to->id);
    std::vector<int> &p = preds_.at(size_t(to->id));
    if (std::find(p.begin(), p.end(), from->id) == p.end())
        p.push_back(from->id);
}

Region *RegionGraph::entry() const { return entry_ < 0 ? nullptr : region(entry_); }

const std::vector<int> &RegionGraph::succs(int region_id) const {
    return succs_.at(size_t(region_id));
}

const std::vector<int> &RegionGraph::preds(int region_id) const {
    return preds_.at(size_t(region_id));
}

Region *RegionGraph::region(int id) const { return arena_.at(size_t(id) - 1).get(); }

const Terminator *RegionGraph::block_term(int block_id) const {
    auto it = block_terms_.find(block_id);
    return it == block_terms_.end() ? nullptr : &it->second;
}

RegionGraph RegionGraph::from_cfg(const Cfg &cfg) {
    RegionGraph g;
    std::map<int, Region *> by_block;
    for (const BasicBlock &b : cfg.blocks) {
        if (!b.reachable || b.mask_absorbed)
            continue;
        Region *r = g.add_block(b.id);
        g.block_terms_[b.id] = b.term;
        by_block[b.id] = r;
        if (b.id == cfg.entry)
            g.entry_ = r->id;
    }
    for (const BasicBlock &b : cfg.blocks) {
        auto from = by_block.find(b.id);
        if (from == by_block.end())
            continue;
        for (int s : b.succs) {
            auto to = by_block.find(s);
            if (to != by_block.end())
                g.add_edge(from->second, to->second);
        }
    }
    return g;
}

std::vector<Region *> RegionGraph::rpo() const {
    std::vector<Region *> order;
    if (entry_ < 0)
        return order;
    std::vector<int> state(size_t(next_id_), 0);
    std::vector<std::pair<int, size_t>> stack;
    std::vector<int> post;
    stack.emplace_back(entry_, 0);
    state[size_t(entry_)] = 1;
    while (!stack.empty()) {
        auto &top = stack.back();
        const std::vector<int> &ss = succs_.at(size_t(top.first));
        if (top.second < ss.size()) {
            int s = ss[top.second++];
            if (state[size_t(s)] == 0) {
                state[size_t(s)] = 1;
                stack.emplace_back(s, 0);
            }
        } else {
            post.push_back(top.first);
            stack.pop_back();
        }
    }
    for (auto it = post.rbegin(); it != post.rend(); ++it)
        order.push_back(region(*it));
    return order;
}

void RegionGraph::replace(const std::vector<int> &old_ids, Region *merged) {
    auto in_old = [&](int id) {
        return std::find(old_ids.begin(), old_ids.end(), id) != old_ids.end();
    };

    // Successors of the merged members, first-appearance order. An edge
    // back to the region's own entry is a loop and survives as a self-edge;
    // dropping it would let a cycle pass for straight-line code. Edges to
    // other members are the consumed internal structure.
    std::vector<int> ext;
    for (int oid : old_ids)
        for (int s : succs_.at(size_t(oid))) {
            int t = s == old_ids.front() ? merged->id : s;
            if (!in_old(t) && std::find(ext.begin(), ext.end(), t) == ext.end())
                ext.push_back(t);
        }
    succs_.at(size_t(merged->id)) = ext;

    live_.erase(std::remove_if(live_.begin(), live_.end(),
                               [&](Region *r) { return in_old(r->id); }),
                live_.end());
    live_.push_back(merged);

    for (Region *r : live_) {
        if (r == merged)
            continue;
        std::vector<int> &ss = succs_.at(size_t(r->id));
        std::vector<int> out;
        for (int s : ss) {
            int t = in_old(s) ? merged->id : s;
            if (std::find(out.begin(), out.end(), t) == out.end())
                out.push_back(t);
        }
        ss = std::move(out);
    }

    for (Region *r : live_)
        preds_.at(size_t(r->id)).clear();
    for (Region *r : live_)
        for (int s : succs_.at(size_t(r->id)))
            preds_.at(size_t(s)).push_back(r->id);

    if (in_old(entry_))
        entry_ = merged->id;
}

namespace {

bool single_pred_is(const RegionGraph &g, int node, int pred) {
    const std::vector<int> &p = g.preds(node);
    return p.size() == 1 && p[0] == pred;
}

// Conditional headers whose branch tests the raw exec mask cannot be
// expressed as a source-level condition; they must have been rewritten by
// the mask normalization first. Refusing them here routes the kernel to
// the labeled-goto fallback instead of producing a wrong `if`.
bool header_usable(const RegionGraph &g, const Region *r, const Terminator **term_out) {
    int exit = exit_block(r);
    const Terminator *t = exit >= 0 ? g.block_term(exit) : nullptr;
    *term_out = t;
    if (!t)
        return true; // synthetic graph: match on shape alone
    if (t->kind != TermKind::Conditional)
        return false;
    return t->cc != CondCode::Execz && t->cc != CondCode::Execnz;
}

CondSpec make_cond(const Terminator *term, bool then_is_taken) {
    CondSpec c;
    if (term) {
        c.cc = term->cc;
        c.mask_source = term->mask_source;
    }
    c.then_is_taken = then_is_taken;
    return c;
}

} // namespace

// The matchers are free functions, so private graph surgery goes through
// this friend.
struct Reducer {
    static Region *make(RegionGraph &graph, RegionKind kind) { return graph.make_region(kind); }
    static void replace(RegionGraph &graph, const std::vector<int> &old_ids, Region *merged) {
        graph.replace(old_ids, merged);
    }
};

Region *match_if_else(RegionGraph &graph, Region *r) {
    const std::vector<int> &ss = graph.succs(r->id);
    if (ss.size() != 2 || ss[0] == ss[1])
        return nullptr;
    const Terminator *term = nullptr;
    if (!header_usable(graph, r, &term))
        return nullptr;

    Region *a = graph.region(ss[0]);
    Region *b = graph.region(ss[1]);
    if (!single_pred_is(graph, a->id, r->id) || !single_pred_is(graph, b->id, r->id))
        return nullptr;
    const std::vector<int> &sa = graph.succs(a->id);
    const std::vector<int> &sb = graph.succs(b->id);
    if (sa.size() != 1 || sb.size() != 1 || sa[0] != sb[0])
        return nullptr;
    int j = sa[0];
    if (j == r->id)
        return nullptr;

    // The then arm sits on the fall-through edge: compilers emit the
    // branch to skip it.
    Region *then_r = a, *else_r = b;
    if (term && term->kind == TermKind::Conditional) {
        if (a->entry_block() == term->taken)
            std::swap(then_r, else_r);
    }

    Region *join_r = graph.region(j);
    const std::vector<int> &pj = graph.preds(j);
    const bool absorb = pj.size() == 2;

    Region *m = Reducer::make(graph, RegionKind::IfElse);
    m->cond = make_cond(term, false);
    m->join_block = join_r->entry_block();
    m->children = {r, then_r, else_r};
    std::vector<int> old{r->id, then_r->id, else_r->id};
    if (absorb) {
        m->children.push_back(join_r);
        m->join_absorbed = true;
        old.push_back(j);
    }
    Reducer::replace(graph, old, m);
    return m;
}

Region *match_if(RegionGraph &graph, Region *r) {
    const std::vector<int> &ss = graph.succs(r->id);
    if (ss.size() != 2 || ss[0] == ss[1])
        return nullptr;
    const Terminator *term = nullptr;
    if (!header_usable(graph, r, &term))
        return nullptr;

    // One successor is the arm (single pred, single succ to the other);
    // the other is the join.
    Region *then_r = nullptr;
    int j = -1;
    for (int k = 0; k < 2; ++k) {
        Region *cand = graph.region(ss[size_t(k)]);
        int other = ss[size_t(1 - k)];
        if (!single_pred_is(graph, cand->id, r->id))
            continue;
        const std::vector<int> &sc = graph.succs(cand->id);
        if (sc.size() == 1 && sc[0] == other && other != r->id) {
            then_r = cand;
            j = other;
            break;
        }
    }
    if (!then_r)
        return nullptr;

    bool then_is_taken = false;
    if (term && term->kind == TermKind::Conditional)
        then_is_taken = then_r->entry_block() == term->taken;

    Region *join_r = graph.region(j);
    const std::vector<int> &pj = graph.preds(j);
    const bool absorb = pj.size() == 2; // exactly the header and the arm

    Region *m = Reducer::make(graph, RegionKind::IfThen);
    m->cond = make_cond(term, then_is_taken);
    m->join_block = join_r->entry_block();
    m->children = {r, then_r};
    std::vector<int> old{r->id, then_r->id};
    if (absorb) {
        m->children.push_back(join_r);
        m->join_absorbed = true;
        old.push_back(j);
    }
    Reducer::replace(graph, old, m);
    return m;
}

Region *match_linear(RegionGraph &graph, Region *r) {
    std::vector<Region *> chain{r};
    Region *cur = r;
    for (;;) {
        const std::vector<int> &ss = graph.succs(cur->id);
        if (ss.size() != 1)
            break;
        Region *next = graph.region(ss[0]);
        if (next == r || !single_pred_is(graph, next->id, cur->id))
            break;
        // A multi-exit successor stays out of the chain so the if matchers
        // see it as a header first.
        if (graph.succs(next->id).size() > 1)
            break;
        chain.push_back(next);
        cur = next;
    }
    if (chain.size() < 2)
        return nullptr;

    Region *m = Reducer::make(graph, RegionKind::Linear);
    m->children = chain;
    std::vector<int> old;
    for (Region *c : chain)
        old.push_back(c->id);
    Reducer::replace(graph, old, m);
    return m;
}

ReduceResult reduce(RegionGraph &graph, const ReduceOptions &opts) {
    ReduceResult res;
    if (opts.record_dumps)
        res.dumps.push_back(region_graph_dot(graph, "step0"));

    bool progress = true;
    while (progress && graph.live_regions().size() > 1) {
        progress = false;
        for (Region *r : graph.rpo()) {
            const std::vector<Region *> &live = graph.live_regions();
            if (std::find(live.begin(), live.end(), r) == live.end())
                continue;

            Region *m = match_if_else(graph, r);
            RegionKind kind = RegionKind::IfElse;
            if (!m) {
                m = match_if(graph, r);
                kind = RegionKind::IfThen;
            }
            if (!m) {
                m = match_linear(graph, r);
                kind = RegionKind::Linear;
            }
            if (!m)
                continue;

            MergeRecord rec;
            rec.kind = kind;
            for (Region *c : m->children)
                rec.absorbed.push_back(c->id);
            rec.result = m->id;
            res.merges.push_back(std::move(rec));
            if (opts.record_dumps) {
                std::ostringstream nm;
                nm << "step" << res.merges.size();
                res.dumps.push_back(region_graph_dot(graph, nm.str()));
            }
            progress = true;
            break; // restart the scan on the rewritten graph
        }
    }

    if (graph.live_regions().size() == 1) {
        res.root = graph.live_regions().front();
        res.reduced = true;
    } else {
        res.residue = graph.live_regions();
    }
    return res;
}

namespace {

bool first_exec_op_is(const BasicBlock &b, ExecOpKind kind, unsigned mask_sgpr) {
    if (b.exec_ops.empty() || b.instructions.empty())
        return false;
    const ExecOp &op = b.exec_ops.front();
    return op.kind == kind && op.mask_sgpr == mask_sgpr && op.index == 0;
}

// Splits block `id` so that instructions [at, end) move into a new block
// the original falls through to. Returns the new block's id.
int split_block(Cfg &cfg, int id, size_t at) {
    BasicBlock nb;
    nb.id = int(cfg.blocks.size());
    {
        BasicBlock &b = cfg.block(id);
        nb.instructions.assign(b.instructions.begin() + long(at), b.instructions.end());
        nb.suppressed.assign(b.suppressed.begin() + long(at), b.suppressed.end());
        nb.term = b.term;
        nb.succs = b.succs;
        b.instructions.resize(at);
        b.suppressed.resize(at);
        b.term = Terminator{};
        b.term.kind = TermKind::Fallthrough;
        b.term.taken = nb.id;
        b.term.line = nb.instructions.front().line;
        b.succs = {nb.id};
    }
    cfg.blocks.push_back(std::move(nb));
    return int(cfg.blocks.size()) - 1;
}

// Puts every save at the end of its block (a trailing execz branch may
// follow), every invert and restore at the start of theirs. Patterns are
// then block-shaped and the match logic needs no intra-block offsets.
bool canonicalize_exec_blocks(Cfg &cfg) {
    annotate_exec(cfg);
    for (BasicBlock &b : cfg.blocks) {
        for (const ExecOp &op : b.exec_ops) {
            const size_t last = b.instructions.size() - 1;
            if (op.kind == ExecOpKind::Save) {
                const bool tail_branch =
                    b.term.kind == TermKind::Conditional &&
                    (b.term.cc == CondCode::Execz || b.term.cc == CondCode::Execnz);
                size_t want = tail_branch ? last - 1 : last;
                if (op.index < want) {
                    split_block(cfg, b.id, op.index + 1);
                    cfg.rebuild_preds();
                    return true;
                }
            } else if (op.index > 0) {
                split_block(cfg, b.id, op.index);
                cfg.rebuild_preds();
                return true;
            }
        }
    }
    return false;
}

struct MaskPattern {
    int header = -1;
    unsigned mask = 0;
    Operand source;
    bool has_bypass = false;
    int then_entry = -1;
    int bypass = -1; // execz target
};

// Forward search from `starts` for blocks that begin with an inversion or
// a restore of `mask`. Traversal does not continue past a hit (everything
// behind it belongs to that block's own pattern) nor past another save of
// the same mask, whose pattern owns its subgraph. Disjoint regions are free
// to reuse a mask register, so a global search would overcount; only what
// the save reaches belongs to it. `header` is exempt from matching: after
// a sequential reuse, the previous join's restore and the next save can
// share a block.
std::vector<int> mask_stops(const Cfg &cfg, std::vector<int> starts, unsigned mask, int header) {
    std::vector<int> stops;
    std::vector<char> seen(cfg.blocks.size(), 0);
    std::vector<int> &work = starts;
    while (!work.empty()) {
        int id = work.back();
        work.pop_back();
        if (id < 0 || size_t(id) >= cfg.blocks.size() || seen[size_t(id)])
            continue;
        seen[size_t(id)] = 1;
        const BasicBlock &b = cfg.blocks[size_t(id)];
        if (id != header) {
            if (first_exec_op_is(b, ExecOpKind::Invert, mask) ||
                first_exec_op_is(b, ExecOpKind::Restore, mask)) {
                stops.push_back(id);
                continue;
            }
            if (!b.exec_ops.empty() && b.exec_ops.back().kind == ExecOpKind::Save &&
                b.exec_ops.back().mask_sgpr == mask)
                continue;
        }
        for (int s : b.succs)
            work.push_back(s);
    }
    return stops;
}

void suppress(BasicBlock &b, size_t index) { b.suppressed.at(index) = true; }

// Points every predecessor of `from` other than `keep` at `to`.
void retarget_preds(Cfg &cfg, int from, int to, int keep) {
    for (int p : cfg.block(from).preds) {
        if (p == keep)
            continue;
        BasicBlock &pb = cfg.block(p);
        for (int &s : pb.succs)
            if (s == from)
                s = to;
        if (pb.term.taken == from)
            pb.term.taken = to;
        if (pb.term.not_taken == from)
            pb.term.not_taken = to;
    }
}

bool apply_mask_pattern(Cfg &cfg, const MaskPattern &pat, DiagnosticSink &sink) {
    BasicBlock &h = cfg.block(pat.header);
    const size_t save_index = h.exec_ops.back().index;

    std::vector<int> stops = mask_stops(cfg, {pat.then_entry}, pat.mask, pat.header);
    if (stops.size() > 1) {
        sink.warning(h.term.line, "exec mask saved in s[" + std::to_string(pat.mask) + ":" +
                                      std::to_string(pat.mask + 1) +
                                      "] has multiple join points");
        return false;
    }
    if (stops.empty()) {
        sink.warning(h.term.line, "exec mask save without inversion or restore");
        return false;
    }
    const int stop = stops[0];
    const int invert = first_exec_op_is(cfg.block(stop), ExecOpKind::Invert, pat.mask) ? stop : -1;

    int then_entry = pat.then_entry;
    int else_entry = -1;
    int join = -1;

    if (invert >= 0) {
        BasicBlock &ib = cfg.block(invert);
        const bool invert_only =
            ib.instructions.size() <= 2 && ib.term.kind == TermKind::Conditional &&
            ib.term.cc == CondCode::Execz;
        if (pat.has_bypass && pat.bypass != invert) {
            sink.warning(h.term.line, "execz branch does not meet the mask inversion");
            return false;
        }
        if (invert_only) {
            // Separate else and join blocks behind the inversion's own
            // execz guard.
            else_entry = ib.term.not_taken;
            join = ib.term.taken;
            suppress(ib, 0);
            if (ib.instructions.size() > 1)
                suppress(ib, 1);
            retarget_preds(cfg, invert, join, pat.header);
            ib.mask_absorbed = true;
            ib.succs.clear();
        } else {
            // The inversion opens the else body directly; the join is the
            // restore block the else body eventually reaches.
            std::vector<int> rstops = mask_stops(cfg, ib.succs, pat.mask, invert);
            if (rstops.size() != 1 ||
                !first_exec_op_is(cfg.block(rstops[0]), ExecOpKind::Restore, pat.mask)) {
                sink.warning(h.term.line, "mask inversion without a matching restore");
                return false;
            }
            else_entry = invert;
            join = rstops[0];
            suppress(ib, 0);
            retarget_preds(cfg, invert, join, pat.header);
        }
    } else {
        // Plain masked if: no else side at all.
        if (pat.has_bypass && pat.bypass != stop) {
            sink.warning(h.term.line, "execz branch does not meet the mask restore");
            return false;
        }
        join = stop;
    }

    if (join >= 0) {
        BasicBlock &jb = cfg.block(join);
        if (first_exec_op_is(jb, ExecOpKind::Restore, pat.mask))
            suppress(jb, 0);
    }

    suppress(h, save_index);
    h.term.kind = TermKind::Conditional;
    h.term.cc = CondCode::Masked;
    h.term.mask_source = pat.source;
    h.term.not_taken = then_entry;
    h.term.taken = else_entry >= 0 ? else_entry : join;
    h.succs = {h.term.taken, h.term.not_taken};

    cfg.rebuild_preds();
    cfg.mark_reachable();
    return true;
}

} // namespace

int normalize_if_else(Cfg &cfg, DiagnosticSink &sink) {
    while (canonicalize_exec_blocks(cfg)) {
    }
    annotate_exec(cfg);

    int rewrites = 0;
    for (size_t scan = 0; scan < cfg.blocks.size(); ++scan) {
        BasicBlock &b = cfg.blocks[scan];
        if (!b.reachable || b.exec_ops.empty())
            continue;
        const ExecOp &op = b.exec_ops.back();
        if (op.kind != ExecOpKind::Save || b.suppressed[op.index])
            continue;

        MaskPattern pat;
        pat.header = b.id;
        pat.mask = op.mask_sgpr;
        pat.source = op.source;
        if (b.term.kind == TermKind::Conditional && b.term.cc == CondCode::Execz) {
            pat.has_bypass = true;
            pat.then_entry = b.term.not_taken;
            pat.bypass = b.term.taken;
            // The guard itself disappears with the rewrite.
            if (!b.instructions.empty())
                suppress(b, b.instructions.size() - 1);
        } else if (b.term.kind == TermKind::Fallthrough) {
            pat.then_entry = b.term.taken;
        } else {
            continue;
        }

        if (apply_mask_pattern(cfg, pat, sink)) {
            ++rewrites;
            annotate_exec(cfg);
        } else if (pat.has_bypass) {
            // Undo the speculative suppression of the execz guard.
            BasicBlock &hb = cfg.block(pat.header);
            hb.suppressed[hb.instructions.size() - 1] = false;
        }
    }
    return rewrites;
}

std::optional<TernaryInfo> detect_ternary(const Instruction &ins) {
    if (ins.parse_failed || ins.parts.prefix != "v" || ins.parts.root != "cndmask")
        return std::nullopt;
    if (ins.operands.size() < 4 || !ins.operands[0].is_vreg())
        return std::nullopt;
    TernaryInfo info;
    info.dst = ins.operands[0].first;
    info.src0 = ins.operands[1];
    info.src1 = ins.operands[2];
    info.cond = ins.operands[3];
    return info;
}

std::string region_graph_dot(const RegionGraph &graph, const std::string &name) {
    std::ostringstream os;
    os << "digraph \"" << name << "\" {\n";
    os << "  node [shape=ellipse, fontname=\"monospace\"];\n";
    for (const Region *r : graph.live_regions()) {
        os << "  r" << r->id << " [label=\"" << r->id;
        switch (r->kind) {
        case RegionKind::Block: os << " B" << r->block_id; break;
        case RegionKind::Linear: os << " lin"; break;
        case RegionKind::IfThen: os << " if"; break;
        case RegionKind::IfElse: os << " if/else"; break;
        }
        os << "\"];\n";
    }
    for (const Region *r : graph.live_regions())
        for (int s : graph.succs(r->id))
            os << "  r" << r->id << " -> r" << s << ";\n";
    os << "}\n";
    return os.str();
}

} // namespace ocldec
