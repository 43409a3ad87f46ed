// SPDX-License-Identifier: Apache-2.0
#include "vaskit/decompose.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

namespace vaskit {

namespace {

struct WorkItem {
    Machine m;
    std::string prov;
    std::optional<Rank> last_rank;
};

int max_arity(const Machine& m) {
    int d = 0;
    for (int q = 0; q < m.n_states(); ++q) d = std::max(d, m.arity(q));
    return d;
}

/// Structural checks the engine relies on (monotonicity is maintained by
/// construction and not re-decided here).
void engine_check(const Machine& m) {
    if (m.n_states() == 0) throw InternalError("engine: machine without states");
    for (const Edge& e : m.edges) {
        if (e.src < 0 || e.src >= m.n_states() || e.tgt < 0 || e.tgt >= m.n_states())
            throw InternalError("engine: edge endpoint out of range");
        if (e.label.kind == EdgeLabel::Kind::Relation &&
            (e.label.rel.n_in() != m.arity(e.src) || e.label.rel.n_out() != m.arity(e.tgt)))
            throw InternalError("engine: label arity mismatch");
    }
}

bool is_line(const Machine& m, const SccInfo& scc) {
    if (scc.comp[m.qin] != 0 || scc.comp[m.qfin] != scc.n_comps - 1) return false;
    std::vector<int> per_gap(scc.n_comps > 0 ? scc.n_comps - 1 : 0, 0);
    for (int ei : scc.bridge_edges) {
        int c1 = scc.comp[m.edges[ei].src];
        int c2 = scc.comp[m.edges[ei].tgt];
        if (c2 != c1 + 1) return false;
        per_gap[c1] += 1;
    }
    for (int c : per_gap)
        if (c != 1) return false;
    return true;
}

void settle_counter_bridges(Machine& m) {
    for (std::size_t i = 0; i < m.edges.size(); ++i)
        if (m.edges[i].label.kind != EdgeLabel::Kind::Relation && !m.edges[i].over)
            m.edges[i].over = counter_bridge_over(m, static_cast<int>(i));
}

Int max_var_value(const SolvedCharSystem& sol, int var) {
    Int mx = 0;
    for (const IntVec& b : sol.minimal) mx = std::max(mx, b[var]);
    return mx;
}

std::vector<Int> var_values(const SolvedCharSystem& sol, int var) {
    std::vector<Int> vals;
    for (const IntVec& b : sol.minimal) vals.push_back(b[var]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

IntVec pair_effect(const IntVec& pair, int n) {
    IntVec eff(n);
    for (int i = 0; i < n; ++i) eff[i] = pair[n + i] - pair[i];
    return eff;
}

// ---------------------------------------------------------------------------
// W3 gadget: route through a Sub/Del/RevDel/Add chain pinning one coordinate.

Machine pin_gadget(const Machine& m, const SccInfo& scc, int state, bool source_side, int pos,
                   const Int& value) {
    Machine out = m;
    int counter_id = m.active[state][pos];
    const std::vector<int>& act = m.active[state];
    std::vector<int> reduced;
    for (int c : act)
        if (c != counter_id) reduced.push_back(c);
    int arity = static_cast<int>(act.size());
    IntVec sub_delta = zero_vec(arity);
    sub_delta[pos] = -value;
    IntVec add_delta = zero_vec(arity);
    add_delta[pos] = value;

    // chain: p0 -Add(-f)-> p1 -Del-> p2 -RevDel-> p3 -Add(+f)-> (next);
    // on the target side the chain starts at the SCC exit instead, so the
    // reduced state sits one step later.
    int p0 = out.n_states();
    out.state_names.push_back("~pin0");
    out.active.push_back(act);
    int p1 = out.n_states();
    out.state_names.push_back("~pin1");
    out.active.push_back(source_side ? act : reduced);
    int p2 = out.n_states();
    out.state_names.push_back("~pin2");
    out.active.push_back(source_side ? reduced : act);
    int p3 = out.n_states();
    out.state_names.push_back("~pin3");
    out.active.push_back(act);

    if (source_side) {
        for (Edge& e : out.edges)
            if (e.tgt == state && scc.comp[e.src] != scc.comp[state]) e.tgt = p0;
        if (m.qin == state) out.qin = p0;
        out.edges.push_back({p0, p1, EdgeLabel::relation(RelationLabel::add(sub_delta)), {}});
        out.edges.push_back({p1, p2, EdgeLabel::delete_counters({counter_id}), {}});
        out.edges.push_back({p2, p3, EdgeLabel::add_counters({counter_id}), {}});
        out.edges.push_back({p3, state, EdgeLabel::relation(RelationLabel::add(add_delta)), {}});
    } else {
        for (Edge& e : out.edges)
            if (e.src == state && scc.comp[e.tgt] != scc.comp[state]) e.src = p3;
        if (m.qfin == state) out.qfin = p3;
        out.edges.push_back({state, p0, EdgeLabel::relation(RelationLabel::add(sub_delta)), {}});
        out.edges.push_back({p0, p1, EdgeLabel::delete_counters({counter_id}), {}});
        out.edges.push_back({p1, p2, EdgeLabel::add_counters({counter_id}), {}});
        out.edges.push_back({p2, p3, EdgeLabel::relation(RelationLabel::add(add_delta)), {}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// W2: delete a state-determined counter from an SCC.

std::map<int, Int> state_values(const Machine& m, const SccInfo& scc, int comp, int pos, int entry,
                                const Int& entry_value) {
    std::map<int, Int> val;
    val[entry] = entry_value;
    std::deque<int> todo{entry};
    while (!todo.empty()) {
        int q = todo.front();
        todo.pop_front();
        for (int ei : scc.edges[comp]) {
            const Edge& e = m.edges[ei];
            if (e.src != q) continue;
            if (!e.over) throw InternalError("state_values: unapproximated edge");
            int n = m.arity(e.src);
            Int nv = val[q] + e.over->base[n + pos] - e.over->base[pos];
            auto it = val.find(e.tgt);
            if (it == val.end()) {
                val[e.tgt] = nv;
                todo.push_back(e.tgt);
            } else if (it->second != nv) {
                throw InternalError("state_values: counter not state-determined");
            }
        }
    }
    return val;
}

Machine delete_scc_counter(const Machine& m, const SccInfo& scc, int comp, int pos,
                           const Int& in_value, const Int& out_value, int entry, int exit) {
    std::map<int, Int> values = state_values(m, scc, comp, pos, entry, in_value);
    if (values.at(exit) != out_value)
        throw InternalError("delete_scc_counter: exit value inconsistent");
    int counter_id = m.active[entry][pos];
    const std::vector<int> full = m.active[entry];
    std::vector<int> reduced;
    for (int cc : full)
        if (cc != counter_id) reduced.push_back(cc);
    int arity = static_cast<int>(full.size());

    Machine out = m;
    for (int q : scc.states[comp]) out.active[q] = reduced;
    for (int ei : scc.edges[comp]) {
        Edge& e = out.edges[ei];
        e.label = EdgeLabel::relation(
            fix_and_drop(e.label.rel, pos, values.at(e.src), values.at(e.tgt)));
        e.over.reset();
    }
    IntVec sub_delta = zero_vec(arity);
    sub_delta[pos] = -in_value;
    IntVec add_delta = zero_vec(arity);
    add_delta[pos] = out_value;

    int a = out.n_states();
    out.state_names.push_back("~w2a");
    out.active.push_back(full);
    int b = out.n_states();
    out.state_names.push_back("~w2b");
    out.active.push_back(full);
    int c = out.n_states();
    out.state_names.push_back("~w2c");
    out.active.push_back(reduced);
    int d = out.n_states();
    out.state_names.push_back("~w2d");
    out.active.push_back(full);

    for (Edge& e : out.edges) {
        if (e.tgt == entry && e.src < m.n_states() && scc.comp[e.src] != comp) e.tgt = a;
        if (e.src == exit && e.tgt < m.n_states() && scc.comp[e.tgt] != comp) e.src = d;
    }
    if (m.qin == entry) out.qin = a;
    if (m.qfin == exit) out.qfin = d;
    out.edges.push_back({a, b, EdgeLabel::relation(RelationLabel::add(sub_delta)), {}});
    out.edges.push_back({b, entry, EdgeLabel::delete_counters({counter_id}), {}});
    out.edges.push_back({exit, c, EdgeLabel::add_counters({counter_id}), {}});
    out.edges.push_back({c, d, EdgeLabel::relation(RelationLabel::add(add_delta)), {}});
    return out;
}

// ---------------------------------------------------------------------------
// W2 cycle test: is there a cycle with nonzero effect on the coordinate?

bool subset_strongly_connected(const Machine& m, const std::vector<int>& edges,
                               unsigned long mask) {
    std::set<int> touched;
    std::map<int, std::vector<int>> adj;
    int count = 0;
    for (std::size_t j = 0; j < edges.size(); ++j) {
        if (!(mask & (1ul << j))) continue;
        ++count;
        const Edge& e = m.edges[edges[j]];
        touched.insert(e.src);
        touched.insert(e.tgt);
        adj[e.src].push_back(e.tgt);
    }
    if (count == 0) return false;
    // every touched state reaches every other through selected edges
    for (int s : touched) {
        std::set<int> seen{s};
        std::deque<int> todo{s};
        while (!todo.empty()) {
            int v = todo.front();
            todo.pop_front();
            for (int w : adj[v])
                if (seen.insert(w).second) todo.push_back(w);
        }
        for (int t : touched)
            if (!seen.count(t)) return false;
    }
    return true;
}

bool has_nonzero_cycle(const Machine& m, const SccInfo& scc, int comp, int pos,
                       const Limits& lim) {
    int n = m.arity(scc.states[comp][0]);
    for (int ei : scc.edges[comp]) {
        const Edge& e = m.edges[ei];
        if (!e.over) throw InternalError("has_nonzero_cycle: unapproximated edge");
        for (const IntVec& p : e.over->periods)
            if (p[n + pos] - p[pos] != 0) return true;
    }
    const std::vector<int>& edges = scc.edges[comp];
    if (edges.size() > 20) throw ResourceError("has_nonzero_cycle: too many edges for support enumeration");
    for (unsigned long mask = 1; mask < (1ul << edges.size()); ++mask) {
        if (!subset_strongly_connected(m, edges, mask)) continue;
        std::vector<int> sel;
        for (std::size_t j = 0; j < edges.size(); ++j)
            if (mask & (1ul << j)) sel.push_back(edges[j]);
        std::set<int> touched;
        for (int ei : sel) {
            touched.insert(m.edges[ei].src);
            touched.insert(m.edges[ei].tgt);
        }
        for (int sign = 0; sign < 2; ++sign) {
            int k = static_cast<int>(sel.size());
            std::vector<IntVec> rows;
            IntVec rhs;
            for (int q : touched) {
                IntVec row = zero_vec(k + 1);
                for (int j = 0; j < k; ++j) {
                    if (m.edges[sel[j]].tgt == q) row[j] += 1;
                    if (m.edges[sel[j]].src == q) row[j] -= 1;
                }
                rows.push_back(std::move(row));
                rhs.push_back(0);
            }
            IntVec erow = zero_vec(k + 1);
            for (int j = 0; j < k; ++j) {
                const LinearSet& over = *m.edges[sel[j]].over;
                Int eff = over.base[n + pos] - over.base[pos];
                erow[j] = sign == 0 ? eff : -eff;
            }
            erow[k] = -1; // slack: effect - s = 1, i.e. effect >= 1
            rows.push_back(std::move(erow));
            rhs.push_back(1);
            LinearSystem sys(IntMat::from_rows(rows), rhs);
            sys.lower = IntVec(k + 1, 0);
            for (int j = 0; j < k; ++j) sys.lower[j] = 1;
            if (is_feasible(sys, lim)) return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Projection of one SCC onto a coordinate subset, as a standalone machine.

Machine scc_projection(const Machine& m, const SccInfo& scc, int comp,
                       const std::vector<int>& keep_pos, int entry) {
    Machine out;
    out.name = m.name + "~scc" + std::to_string(comp);
    const std::vector<int>& act = m.active[scc.states[comp][0]];
    std::vector<int> keep_ids;
    for (int p : keep_pos) keep_ids.push_back(act[p]);
    out.counters = m.counters;
    std::map<int, int> remap;
    for (int q : scc.states[comp]) {
        remap[q] = out.n_states();
        out.state_names.push_back(m.state_names[q]);
        out.active.push_back(keep_ids);
    }
    for (int ei : scc.edges[comp]) {
        const Edge& e = m.edges[ei];
        Edge ne;
        ne.src = remap[e.src];
        ne.tgt = remap[e.tgt];
        ne.label = EdgeLabel::relation(project_label(e.label.rel, keep_pos));
        out.edges.push_back(std::move(ne));
    }
    out.qin = out.qfin = remap[entry];
    return out;
}

// ---------------------------------------------------------------------------
// Forward Karp-Miller overapproximation for bound extraction.

struct AbsConfig {
    int state = 0;
    std::vector<std::optional<Int>> val; // nullopt = omega
};

bool abs_covers(const AbsConfig& big, const AbsConfig& small) {
    if (big.state != small.state) return false;
    for (std::size_t i = 0; i < big.val.size(); ++i) {
        if (!big.val[i]) continue; // omega covers anything
        if (!small.val[i] || *small.val[i] > *big.val[i]) return false;
    }
    return true;
}

/// Sound per-counter bounds over everything reachable from (qin, start).
/// Returns max finite values for counters that never turn omega.
std::vector<std::optional<Int>> km_bounds(const Machine& m, const IntVec& start,
                                          const Limits& lim) {
    int n = m.arity(m.qin);
    std::vector<AbsConfig> processed;
    struct Node {
        AbsConfig cfg;
        int parent;
    };
    std::vector<Node> tree;
    std::deque<int> todo;
    AbsConfig root{m.qin, {}};
    for (const Int& v : start) root.val.push_back(v);
    tree.push_back({root, -1});
    todo.push_back(0);
    while (!todo.empty()) {
        int idx = todo.front();
        todo.pop_front();
        AbsConfig c = tree[idx].cfg;
        bool covered = false;
        for (const AbsConfig& p : processed)
            if (abs_covers(p, c)) {
                covered = true;
                break;
            }
        if (covered) continue;
        processed.push_back(c);
        if (static_cast<std::int64_t>(processed.size()) > lim.product_states)
            throw ResourceError("km_bounds: node cap exceeded");
        for (std::size_t ei = 0; ei < m.edges.size(); ++ei) {
            const Edge& e = m.edges[ei];
            if (e.src != c.state || e.label.kind != EdgeLabel::Kind::Relation) continue;
            std::vector<AbsConfig> succs;
            const RelationLabel& r = e.label.rel;
            if (r.kind == RelationLabel::Kind::Add) {
                AbsConfig s{e.tgt, c.val};
                bool ok = true;
                for (int i = 0; i < n && ok; ++i) {
                    if (!s.val[i]) continue;
                    Int nv = *s.val[i] + r.delta[i];
                    if (nv < 0) ok = false;
                    s.val[i] = nv;
                }
                if (ok) succs.push_back(std::move(s));
            } else {
                // constrain the source to the known finite coordinates
                std::vector<IntVec> periods;
                IntVec base = zero_vec(2 * n);
                for (int i = 0; i < n; ++i) {
                    if (c.val[i])
                        base[i] = *c.val[i];
                    else
                        periods.push_back(unit_vec(2 * n, i));
                    periods.push_back(unit_vec(2 * n, n + i));
                }
                SemilinearSet src_set = from_hybrid(hybrid({base}, periods));
                RelationLabel restricted = intersect_semilinear(r, src_set);
                for (const ApproxComponent& comp : approximate(restricted, lim)) {
                    AbsConfig s{e.tgt, {}};
                    s.val.resize(n);
                    for (int i = 0; i < n; ++i) s.val[i] = comp.over.base[n + i];
                    for (const IntVec& p : comp.over.periods)
                        for (int i = 0; i < n; ++i)
                            if (p[n + i] != 0) s.val[i] = std::nullopt;
                    succs.push_back(std::move(s));
                }
            }
            for (AbsConfig& s : succs) {
                // acceleration against ancestors
                bool changed = true;
                while (changed) {
                    changed = false;
                    for (int anc = idx; anc >= 0; anc = tree[anc].parent) {
                        const AbsConfig& av = tree[anc].cfg;
                        if (av.state != s.state) continue;
                        bool ge = true, strict = false;
                        for (int i = 0; i < n; ++i) {
                            if (!av.val[i]) {
                                if (s.val[i]) ge = false;
                                continue;
                            }
                            if (!s.val[i]) {
                                strict = true;
                                continue;
                            }
                            if (*s.val[i] < *av.val[i]) ge = false;
                            if (*s.val[i] > *av.val[i]) strict = true;
                        }
                        if (ge && strict) {
                            for (int i = 0; i < n; ++i)
                                if (av.val[i] && s.val[i] && *s.val[i] > *av.val[i]) {
                                    s.val[i] = std::nullopt;
                                    changed = true;
                                }
                        }
                        if (changed) break;
                    }
                }
                tree.push_back({s, idx});
                todo.push_back(static_cast<int>(tree.size()) - 1);
            }
        }
    }
    std::vector<std::optional<Int>> bounds(n, Int(0));
    for (const AbsConfig& p : processed)
        for (int i = 0; i < n; ++i) {
            if (!p.val[i])
                bounds[i] = std::nullopt;
            else if (bounds[i] && *p.val[i] > *bounds[i])
                bounds[i] = *p.val[i];
        }
    return bounds;
}

} // namespace

// ---------------------------------------------------------------------------
// Backwards coverability.

CoverOutcome backwards_cover(const Machine& scc_machine, const IntVec& entry, const Limits& lim) {
    const Machine& m = scc_machine;
    int n = m.arity(m.qin);
    IntVec target = entry;
    for (Int& v : target) v += 1;
    std::vector<std::vector<IntVec>> basis(m.n_states());
    basis[m.qin].push_back(target);
    auto add_basis = [&](int state, const IntVec& x) {
        for (const IntVec& u : basis[state])
            if (dominated(u, x)) return false;
        std::vector<IntVec> kept;
        for (IntVec& u : basis[state])
            if (!dominated(x, u)) kept.push_back(std::move(u));
        kept.push_back(x);
        sort_unique(kept);
        basis[state] = std::move(kept);
        return true;
    };
    bool changed = true;
    std::int64_t steps = 0;
    while (changed) {
        changed = false;
        for (std::size_t ei = 0; ei < m.edges.size(); ++ei) {
            const Edge& e = m.edges[ei];
            if (e.label.kind != EdgeLabel::Kind::Relation) continue;
            std::vector<IntVec> targets = basis[e.tgt];
            for (const IntVec& y : targets) {
                if (++steps > lim.product_states)
                    throw ResourceError("backwards_cover: step cap exceeded");
                // components of R(e) ∩ (N^n x y↑); their bases are minimal pres
                std::vector<IntVec> periods;
                for (int i = 0; i < n; ++i) {
                    periods.push_back(unit_vec(2 * n, i));
                    periods.push_back(unit_vec(2 * n, n + i));
                }
                IntVec base = concat(zero_vec(n), y);
                SemilinearSet up = from_hybrid(hybrid({base}, periods));
                RelationLabel restricted = intersect_semilinear(e.label.rel, up);
                for (const ApproxComponent& comp : approximate(restricted, lim)) {
                    IntVec src(comp.over.base.begin(), comp.over.base.begin() + n);
                    if (add_basis(e.src, src)) changed = true;
                }
            }
        }
    }
    for (const IntVec& u : basis[m.qin])
        if (dominated(u, entry)) return {true, -1, 0};
    // not coverable: extract a sound bound from the forward overapproximation
    std::vector<std::optional<Int>> bounds = km_bounds(m, entry, lim);
    for (int i = 0; i < n; ++i)
        if (bounds[i]) return {false, i, *bounds[i]};
    throw InternalError("backwards_cover: no extractable bound (bug trap)");
}

// ---------------------------------------------------------------------------
// Cleaning.

namespace {

std::vector<WorkItem> clean_items(WorkItem root, int dim_bound, const Limits& lim,
                                  EngineStats* stats) {
    std::vector<WorkItem> out;
    std::deque<WorkItem> queue;
    queue.push_back(std::move(root));
    std::int64_t iters = 0;
    while (!queue.empty()) {
        WorkItem item = std::move(queue.front());
        queue.pop_front();
        if (++iters > lim.clean_iterations)
            throw InternalError("clean: repair loop did not stabilize (bug trap)");
        if (stats) ++stats->iterations;
        engine_check(item.m);
        settle_counter_bridges(item.m);
        SccInfo scc = scc_info(item.m);
        // C1
        if (!is_line(item.m, scc)) {
            std::vector<Machine> lines = linearize(item.m, lim);
            for (std::size_t i = 0; i < lines.size(); ++i)
                queue.push_back({std::move(lines[i]), item.prov + ".l" + std::to_string(i),
                                 item.last_rank});
            continue;
        }
        // C2
        int dirty = -1;
        for (std::size_t i = 0; i < item.m.edges.size(); ++i)
            if (!item.m.edges[i].over) {
                dirty = static_cast<int>(i);
                break;
            }
        if (dirty >= 0) {
            const Edge e = item.m.edges[dirty];
            std::vector<ApproxComponent> comps = approximate(e.label.rel, lim);
            bool intra = scc.comp[e.src] == scc.comp[e.tgt];
            if (intra) {
                Machine m2 = item.m;
                m2.edges.erase(m2.edges.begin() + dirty);
                for (const ApproxComponent& c : comps) {
                    Edge ne;
                    ne.src = e.src;
                    ne.tgt = e.tgt;
                    ne.label = EdgeLabel::relation(c.restricted);
                    ne.over = c.over;
                    m2.edges.push_back(std::move(ne));
                }
                queue.push_back({std::move(m2), item.prov, item.last_rank});
            } else {
                for (std::size_t k = 0; k < comps.size(); ++k) {
                    Machine m2 = item.m;
                    m2.edges[dirty].label = EdgeLabel::relation(comps[k].restricted);
                    m2.edges[dirty].over = comps[k].over;
                    queue.push_back({std::move(m2), item.prov + ".b" + std::to_string(k),
                                     item.last_rank});
                }
                // empty component list drops the machine
            }
            continue;
        }
        // rank bookkeeping: cleaning must never increase the rank
        Rank rk = rank_of(item.m, dim_bound);
        if (item.last_rank && rank_less(*item.last_rank, rk))
            throw InternalError("clean increased rank");
        item.last_rank = rk;

        CharSystem cs = build_charsys(item.m);
        SolvedCharSystem sol = solve_charsys(cs, lim);
        if (!sol.feasible) continue;

        // W1: every bridge period variable unbounded
        {
            std::map<int, std::vector<int>> bounded_per_bridge;
            for (std::size_t v = 0; v < cs.vars.size(); ++v)
                if (cs.vars[v].kind == VarInfo::Kind::BridgePeriod && !sol.unbounded[v])
                    bounded_per_bridge[cs.vars[v].edge].push_back(static_cast<int>(v));
            if (!bounded_per_bridge.empty()) {
                auto [ei, vars] = *bounded_per_bridge.begin();
                Machine m2 = item.m;
                const LinearSet& over = *m2.edges[ei].over;
                std::vector<int> bounded_idx;
                for (int v : vars) bounded_idx.push_back(cs.vars[v].period);
                // joint value tuples of the bounded period variables
                std::vector<IntVec> tuples;
                for (const IntVec& b : sol.minimal) {
                    IntVec t;
                    for (int v : vars) t.push_back(b[v]);
                    tuples.push_back(std::move(t));
                }
                sort_unique(tuples);
                std::vector<IntVec> bases;
                for (const IntVec& t : tuples) {
                    IntVec nb = over.base;
                    for (std::size_t k = 0; k < bounded_idx.size(); ++k)
                        nb = add(nb, scale(t[k], over.periods[bounded_idx[k]]));
                    bases.push_back(std::move(nb));
                }
                std::vector<IntVec> free_periods;
                for (std::size_t p = 0; p < over.periods.size(); ++p)
                    if (std::find(bounded_idx.begin(), bounded_idx.end(), static_cast<int>(p)) ==
                        bounded_idx.end())
                        free_periods.push_back(over.periods[p]);
                SemilinearSet folded = from_hybrid(hybrid(bases, free_periods));
                m2.edges[ei].label =
                    EdgeLabel::relation(intersect_semilinear(m2.edges[ei].label.rel, folded));
                m2.edges[ei].over.reset();
                queue.push_back({std::move(m2), item.prov + ".w1", item.last_rank});
                continue;
            }
        }
        // W3: bounded source/target variables take unique values
        {
            int bad_var = -1;
            for (std::size_t v = 0; v < cs.vars.size(); ++v) {
                auto kind = cs.vars[v].kind;
                if ((kind == VarInfo::Kind::Src || kind == VarInfo::Kind::Tgt) &&
                    !sol.unbounded[v] && var_values(sol, static_cast<int>(v)).size() > 1) {
                    bad_var = static_cast<int>(v);
                    break;
                }
            }
            if (bad_var >= 0) {
                const VarInfo& vi = cs.vars[bad_var];
                bool source_side = vi.kind == VarInfo::Kind::Src;
                int state = source_side ? cs.entry_state[vi.scc] : cs.exit_state[vi.scc];
                std::vector<Int> values = var_values(sol, bad_var);
                for (const Int& f : values)
                    queue.push_back({pin_gadget(item.m, scc, state, source_side, vi.coord, f),
                                     item.prov + ".w3_" + f.get_str(), item.last_rank});
                continue;
            }
        }
        // W2: bounded-counter SCCs need a nonzero-effect cycle
        {
            bool decomposed = false;
            for (int i = 0; i < cs.n_sccs && !decomposed; ++i) {
                if (cs.scc.trivial[i]) continue;
                int n_i = item.m.arity(cs.scc.states[i][0]);
                for (int j = 0; j < n_i && !decomposed; ++j) {
                    int xv = cs.src_start[i] + j;
                    int yv = cs.tgt_start[i] + j;
                    if (sol.unbounded[xv] || sol.unbounded[yv]) continue;
                    if (has_nonzero_cycle(item.m, cs.scc, i, j, lim)) continue;
                    Int in_value = var_values(sol, xv).at(0);
                    Int out_value = var_values(sol, yv).at(0);
                    queue.push_back({delete_scc_counter(item.m, cs.scc, i, j, in_value, out_value,
                                                        cs.entry_state[i], cs.exit_state[i]),
                                     item.prov + ".w2_" + std::to_string(j), item.last_rank});
                    decomposed = true;
                }
            }
            if (decomposed) continue;
        }
        out.push_back(std::move(item));
    }
    return out;
}

} // namespace

std::vector<Machine> engine_clean(const Machine& m, const Limits& lim) {
    std::vector<Machine> out;
    for (WorkItem& w : clean_items({m, "r", std::nullopt}, max_arity(m), lim, nullptr))
        out.push_back(std::move(w.m));
    return out;
}

// ---------------------------------------------------------------------------
// Perfectness.

namespace {

PerfectVerdict perfect_check(const Machine& m, const CharSystem& cs, const SolvedCharSystem& sol,
                             const Limits& lim) {
    PerfectVerdict v;
    for (std::size_t i = 0; i < cs.vars.size(); ++i)
        if (cs.vars[i].kind == VarInfo::Kind::BridgePeriod && !sol.unbounded[i]) {
            v.kind = PerfectVerdict::Kind::W1;
            v.var = static_cast<int>(i);
            return v;
        }
    for (std::size_t i = 0; i < cs.vars.size(); ++i) {
        auto kind = cs.vars[i].kind;
        if ((kind == VarInfo::Kind::Src || kind == VarInfo::Kind::Tgt) && !sol.unbounded[i] &&
            var_values(sol, static_cast<int>(i)).size() > 1) {
            v.kind = PerfectVerdict::Kind::W3;
            v.var = static_cast<int>(i);
            return v;
        }
    }
    for (int i = 0; i < cs.n_sccs; ++i) {
        if (cs.scc.trivial[i]) continue;
        int n_i = m.arity(cs.scc.states[i][0]);
        for (int j = 0; j < n_i; ++j) {
            if (sol.unbounded[cs.src_start[i] + j] || sol.unbounded[cs.tgt_start[i] + j]) continue;
            if (!has_nonzero_cycle(m, cs.scc, i, j, lim)) {
                v.kind = PerfectVerdict::Kind::W2;
                v.scc = i;
                v.counter = j;
                return v;
            }
        }
    }
    for (std::size_t i = 0; i < cs.vars.size(); ++i) {
        auto kind = cs.vars[i].kind;
        if ((kind == VarInfo::Kind::EdgeCount || kind == VarInfo::Kind::SccPeriod) &&
            !sol.unbounded[i]) {
            v.kind = PerfectVerdict::Kind::P1;
            v.scc = cs.vars[i].scc;
            v.var = static_cast<int>(i);
            return v;
        }
    }
    // P2: forwards and backwards coverability per nontrivial SCC
    for (int dir = 0; dir < 2; ++dir) {
        for (int i = 0; i < cs.n_sccs; ++i) {
            if (cs.scc.trivial[i]) continue;
            int n_i = m.arity(cs.scc.states[i][0]);
            std::vector<int> bounded_pos;
            IntVec entry_vals;
            for (int j = 0; j < n_i; ++j) {
                int var = dir == 0 ? cs.src_start[i] + j : cs.tgt_start[i] + j;
                if (!sol.unbounded[var]) {
                    bounded_pos.push_back(j);
                    entry_vals.push_back(var_values(sol, var).at(0));
                }
            }
            if (bounded_pos.empty()) continue;
            Machine proj = scc_projection(m, cs.scc, i, bounded_pos,
                                          dir == 0 ? cs.entry_state[i] : cs.exit_state[i]);
            if (dir == 1) {
                proj = reverse_machine(proj);
                proj.qin = proj.qfin; // same state, reversal keeps indices
            }
            CoverOutcome cov = backwards_cover(proj, entry_vals, lim);
            if (!cov.coverable) {
                v.kind = PerfectVerdict::Kind::P2;
                v.scc = i;
                v.counter = bounded_pos[cov.counter];
                v.bound = cov.bound;
                v.backward = dir == 1;
                return v;
            }
        }
    }
    v.kind = PerfectVerdict::Kind::Perfect;
    return v;
}

} // namespace

PerfectVerdict engine_is_perfect(const Machine& m, const Limits& lim) {
    CharSystem cs = build_charsys(m);
    SolvedCharSystem sol = solve_charsys(cs, lim);
    if (!sol.feasible) {
        PerfectVerdict v;
        v.kind = PerfectVerdict::Kind::Perfect; // empty relations are vacuously perfect
        v.scc = -2;                             // marker: infeasible
        return v;
    }
    return perfect_check(m, cs, sol, lim);
}

// ---------------------------------------------------------------------------
// Actual decompositions (P1, P2).

namespace {

/// Mixed-radix tuple space for the bounded objects of one SCC.
struct CapSpace {
    std::vector<Int> caps;
    std::vector<IntVec> tuples;

    void enumerate(const Limits& lim) {
        IntVec cur(caps.size(), Int(0));
        while (true) {
            tuples.push_back(cur);
            if (static_cast<std::int64_t>(tuples.size()) > lim.product_states)
                throw ResourceError("decompose: product cap exceeded");
            int i = static_cast<int>(caps.size()) - 1;
            while (i >= 0 && cur[i] == caps[i]) {
                cur[i] = 0;
                --i;
            }
            if (i < 0) break;
            cur[i] += 1;
        }
        if (caps.empty()) tuples = {IntVec{}};
    }

    int index_of(const IntVec& t) const {
        for (std::size_t i = 0; i < tuples.size(); ++i)
            if (tuples[i] == t) return static_cast<int>(i);
        return -1;
    }
};

Machine decompose_p1(const Machine& m, const CharSystem& cs, const SolvedCharSystem& sol, int comp,
                     const Limits& lim) {
    // bounded edge variables and bounded (nonzero-effect) period variables
    std::vector<int> bounded_edges;                 // edge indices
    std::vector<std::pair<int, int>> bounded_pers;  // (edge index, period index)
    CapSpace space;
    for (std::size_t v = 0; v < cs.vars.size(); ++v) {
        const VarInfo& vi = cs.vars[v];
        if (vi.scc != comp) continue;
        if (vi.kind == VarInfo::Kind::EdgeCount && !sol.unbounded[v]) {
            bounded_edges.push_back(vi.edge);
            space.caps.push_back(max_var_value(sol, static_cast<int>(v)));
        }
    }
    for (std::size_t v = 0; v < cs.vars.size(); ++v) {
        const VarInfo& vi = cs.vars[v];
        if (vi.scc != comp) continue;
        if (vi.kind == VarInfo::Kind::SccPeriod && !sol.unbounded[v]) {
            bounded_pers.push_back({vi.edge, vi.period});
            space.caps.push_back(max_var_value(sol, static_cast<int>(v)));
        }
    }
    if (bounded_edges.empty() && bounded_pers.empty())
        throw InternalError("decompose_p1: nothing bounded");
    space.enumerate(lim);

    int n_i = m.arity(cs.scc.states[comp][0]);
    int entry = cs.entry_state[comp];
    int exit = cs.exit_state[comp];

    Machine out;
    out.name = m.name;
    out.counters = m.counters;
    out.qin = -1;
    out.qfin = -1;
    // copy states outside the component
    std::vector<int> remap(m.n_states(), -1);
    for (int q = 0; q < m.n_states(); ++q) {
        if (cs.scc.comp[q] == comp) continue;
        remap[q] = out.n_states();
        out.state_names.push_back(m.state_names[q]);
        out.active.push_back(m.active[q]);
    }
    // product states
    std::map<std::pair<int, int>, int> prod; // (state, tuple idx) -> new id
    for (int q : cs.scc.states[comp])
        for (std::size_t t = 0; t < space.tuples.size(); ++t) {
            prod[{q, static_cast<int>(t)}] = out.n_states();
            out.state_names.push_back(m.state_names[q] + "#" + std::to_string(t));
            out.active.push_back(m.active[q]);
        }
    int zero_idx = space.index_of(IntVec(space.caps.size(), Int(0)));
    // edges outside the component, with bridges rerouted
    for (std::size_t ei = 0; ei < m.edges.size(); ++ei) {
        const Edge& e = m.edges[ei];
        bool src_in = cs.scc.comp[e.src] == comp;
        bool tgt_in = cs.scc.comp[e.tgt] == comp;
        if (src_in && tgt_in) continue;
        if (!src_in && !tgt_in) {
            Edge ne = e;
            ne.src = remap[e.src];
            ne.tgt = remap[e.tgt];
            out.edges.push_back(std::move(ne));
        } else if (tgt_in) {
            Edge ne = e;
            ne.src = remap[e.src];
            ne.tgt = prod.at({e.tgt, zero_idx});
            out.edges.push_back(std::move(ne));
        } else {
            for (std::size_t t = 0; t < space.tuples.size(); ++t) {
                Edge ne = e;
                ne.src = prod.at({e.src, static_cast<int>(t)});
                ne.tgt = remap[e.tgt];
                out.edges.push_back(std::move(ne));
            }
        }
    }
    if (remap[m.qin] >= 0)
        out.qin = remap[m.qin];
    else
        out.qin = prod.at({m.qin, zero_idx});
    if (remap[m.qfin] >= 0) {
        out.qfin = remap[m.qfin];
    } else {
        // collector state after the product exits
        int f = out.n_states();
        out.state_names.push_back("~p1end");
        out.active.push_back(m.active[m.qfin]);
        for (std::size_t t = 0; t < space.tuples.size(); ++t)
            out.edges.push_back({prod.at({m.qfin, static_cast<int>(t)}), f,
                                 EdgeLabel::relation(RelationLabel::add(zero_vec(n_i))), {}});
        out.qfin = f;
    }
    (void)entry;
    (void)exit;
    // product edges
    int nb_edges = static_cast<int>(bounded_edges.size());
    for (int ei : cs.scc.edges[comp]) {
        const Edge& e = m.edges[ei];
        const LinearSet& over = *e.over;
        int epos = -1;
        for (int k = 0; k < nb_edges; ++k)
            if (bounded_edges[k] == ei) epos = k;
        // usage tuples for this edge's bounded periods
        std::vector<int> per_slots;
        for (std::size_t k = 0; k < bounded_pers.size(); ++k)
            if (bounded_pers[k].first == ei) per_slots.push_back(static_cast<int>(k));
        CapSpace usage;
        for (int k : per_slots) usage.caps.push_back(space.caps[nb_edges + k]);
        usage.enumerate(lim);
        std::vector<int> removed;
        for (int k : per_slots) removed.push_back(bounded_pers[k].second);
        std::vector<IntVec> free_periods;
        for (std::size_t p = 0; p < over.periods.size(); ++p)
            if (std::find(removed.begin(), removed.end(), static_cast<int>(p)) == removed.end())
                free_periods.push_back(over.periods[p]);
        for (std::size_t t = 0; t < space.tuples.size(); ++t) {
            for (const IntVec& delta : usage.tuples) {
                IntVec next = space.tuples[t];
                bool ok = true;
                if (epos >= 0) {
                    next[epos] += 1;
                    if (next[epos] > space.caps[epos]) ok = false;
                }
                for (std::size_t k = 0; k < per_slots.size() && ok; ++k) {
                    int slot = nb_edges + per_slots[k];
                    next[slot] += delta[k];
                    if (next[slot] > space.caps[slot]) ok = false;
                }
                if (!ok) continue;
                int tn = space.index_of(next);
                IntVec nb = over.base;
                for (std::size_t k = 0; k < per_slots.size(); ++k)
                    nb = add(nb, scale(delta[k], over.periods[bounded_pers[per_slots[k]].second]));
                SemilinearSet piece = from_hybrid(hybrid({nb}, free_periods));
                Edge ne;
                ne.src = prod.at({e.src, static_cast<int>(t)});
                ne.tgt = prod.at({e.tgt, tn});
                ne.label = EdgeLabel::relation(intersect_semilinear(e.label.rel, piece));
                out.edges.push_back(std::move(ne));
            }
        }
    }
    return out;
}

Machine decompose_p2(const Machine& m, const CharSystem& cs, int comp, int pos, const Int& bound,
                     const Limits& lim) {
    int entry = cs.entry_state[comp];
    int exit = cs.exit_state[comp];
    int counter_id = m.active[cs.scc.states[comp][0]][pos];
    const std::vector<int> full = m.active[entry];
    std::vector<int> reduced;
    for (int cc : full)
        if (cc != counter_id) reduced.push_back(cc);
    int arity = static_cast<int>(full.size());
    if (bound + 1 > lim.product_states) throw ResourceError("decompose_p2: bound too large");

    Machine out;
    out.name = m.name;
    out.counters = m.counters;
    std::vector<int> remap(m.n_states(), -1);
    for (int q = 0; q < m.n_states(); ++q) {
        if (cs.scc.comp[q] == comp) continue;
        remap[q] = out.n_states();
        out.state_names.push_back(m.state_names[q]);
        out.active.push_back(m.active[q]);
    }
    std::map<std::pair<int, Int>, int> prod;
    for (int q : cs.scc.states[comp])
        for (Int v = 0; v <= bound; ++v) {
            prod[{q, v}] = out.n_states();
            out.state_names.push_back(m.state_names[q] + "@" + v.get_str());
            out.active.push_back(reduced);
        }
    // entry bracket: in_node -Add(-v)-> sub_v -Del-> (entry, v)
    int in_node = out.n_states();
    out.state_names.push_back("~p2in");
    out.active.push_back(full);
    for (Int v = 0; v <= bound; ++v) {
        int sv = out.n_states();
        out.state_names.push_back("~p2sub" + v.get_str());
        out.active.push_back(full);
        IntVec d = zero_vec(arity);
        d[pos] = -v;
        out.edges.push_back({in_node, sv, EdgeLabel::relation(RelationLabel::add(d)), {}});
        out.edges.push_back({sv, prod.at({entry, v}), EdgeLabel::delete_counters({counter_id}), {}});
    }
    // exit bracket: (exit, v) -RevDel-> add_v -Add(+v)-> out_node
    int out_node = out.n_states();
    out.state_names.push_back("~p2out");
    out.active.push_back(full);
    for (Int v = 0; v <= bound; ++v) {
        int av = out.n_states();
        out.state_names.push_back("~p2add" + v.get_str());
        out.active.push_back(full);
        IntVec d = zero_vec(arity);
        d[pos] = v;
        out.edges.push_back({prod.at({exit, v}), av, EdgeLabel::add_counters({counter_id}), {}});
        out.edges.push_back({av, out_node, EdgeLabel::relation(RelationLabel::add(d)), {}});
    }
    // outside edges with rerouted bridges
    for (std::size_t ei = 0; ei < m.edges.size(); ++ei) {
        const Edge& e = m.edges[ei];
        bool src_in = cs.scc.comp[e.src] == comp;
        bool tgt_in = cs.scc.comp[e.tgt] == comp;
        if (src_in && tgt_in) continue;
        Edge ne = e;
        if (!src_in && !tgt_in) {
            ne.src = remap[e.src];
            ne.tgt = remap[e.tgt];
        } else if (tgt_in) {
            ne.src = remap[e.src];
            ne.tgt = in_node;
        } else {
            ne.src = out_node;
            ne.tgt = remap[e.tgt];
        }
        out.edges.push_back(std::move(ne));
    }
    out.qin = cs.scc.comp[m.qin] == comp ? in_node : remap[m.qin];
    out.qfin = cs.scc.comp[m.qfin] == comp ? out_node : remap[m.qfin];
    // product edges: every value pair within the bound
    for (int ei : cs.scc.edges[comp]) {
        const Edge& e = m.edges[ei];
        for (Int v = 0; v <= bound; ++v) {
            for (Int w = 0; w <= bound; ++w) {
                RelationLabel r = fix_and_drop(e.label.rel, pos, v, w);
                if (r.kind == RelationLabel::Kind::Semilinear && r.rel.empty()) continue;
                Edge ne;
                ne.src = prod.at({e.src, v});
                ne.tgt = prod.at({e.tgt, w});
                ne.label = EdgeLabel::relation(std::move(r));
                out.edges.push_back(std::move(ne));
            }
        }
    }
    (void)lim;
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Algorithm 1.

std::vector<PerfectComponent> approximate_machine(const Machine& m, const Limits& lim,
                                                  EngineStats* stats) {
    engine_check(m);
    int dim_bound = max_arity(m);
    std::vector<PerfectComponent> components;
    std::deque<WorkItem> workset;
    for (WorkItem& w : clean_items({m, "r", std::nullopt}, dim_bound, lim, stats))
        workset.push_back(std::move(w));
    while (!workset.empty()) {
        if (stats)
            stats->workset_peak = std::max(stats->workset_peak,
                                           static_cast<std::int64_t>(workset.size()));
        WorkItem item = std::move(workset.front());
        workset.pop_front();
        CharSystem cs = build_charsys(item.m);
        SolvedCharSystem sol = solve_charsys(cs, lim);
        if (!sol.feasible) continue;
        PerfectVerdict v = perfect_check(item.m, cs, sol, lim);
        if (v.kind == PerfectVerdict::Kind::W1 || v.kind == PerfectVerdict::Kind::W3 ||
            v.kind == PerfectVerdict::Kind::W2)
            throw InternalError("approximate_machine: cleaning invariant violated");
        if (v.kind == PerfectVerdict::Kind::Perfect) {
            std::vector<int> vars;
            int n1 = item.m.arity(cs.entry_state[0]);
            int nr = item.m.arity(cs.exit_state[cs.n_sccs - 1]);
            for (int j = 0; j < n1; ++j) vars.push_back(cs.src_start[0] + j);
            for (int j = 0; j < nr; ++j) vars.push_back(cs.tgt_start[cs.n_sccs - 1] + j);
            PerfectComponent pc;
            pc.machine = item.m;
            pc.over = project_solutions(sol, vars);
            pc.provenance = item.prov;
            components.push_back(std::move(pc));
            if (stats) ++stats->components;
            continue;
        }
        Rank rk = rank_of(item.m, dim_bound);
        if (stats) stats->ranks.push_back(item.prov + ": " + to_string(rk.v));
        Machine child = v.kind == PerfectVerdict::Kind::P1
                            ? decompose_p1(item.m, cs, sol, v.scc, lim)
                            : decompose_p2(item.m, cs, v.scc, v.counter, v.bound, lim);
        std::string tag = v.kind == PerfectVerdict::Kind::P1
                              ? ".p1s" + std::to_string(v.scc)
                              : ".p2s" + std::to_string(v.scc) + "c" + std::to_string(v.counter);
        for (WorkItem& w : clean_items({std::move(child), item.prov + tag, std::nullopt}, dim_bound, lim,
                                       stats)) {
            Rank crk = rank_of(w.m, dim_bound);
            if (!rank_less(crk, rk))
                throw InternalError("approximate_machine: decomposition failed to decrease rank");
            if (static_cast<std::int64_t>(workset.size()) > lim.workset)
                throw ResourceError("approximate_machine: workset cap exceeded");
            workset.push_back(std::move(w));
        }
    }
    std::sort(components.begin(), components.end(),
              [](const PerfectComponent& a, const PerfectComponent& b) {
                  return a.provenance < b.provenance;
              });
    return components;
}

// ---------------------------------------------------------------------------
// The approximation interface for Section labels, and exact membership.

namespace {

std::mutex g_memo_mutex;
std::map<std::string, std::vector<ApproxComponent>> g_approx_memo;
std::map<std::string, bool> g_point_memo;

thread_local int g_engine_depth = 0;

struct DepthGuard {
    explicit DepthGuard(const Limits& lim) {
        if (++g_engine_depth > lim.engine_depth)
            throw ResourceError("engine recursion depth cap exceeded");
    }
    ~DepthGuard() { --g_engine_depth; }
};

SectionLabel convert_if_vassnz(const SectionLabel& sec) {
    if (!is_vassnz(*sec.machine) || vassnz_priorities(*sec.machine).empty()) return sec;
    Machine conv = vassnz_to_mevass(*sec.machine);
    SectionLabel out = sec;
    int nq = sec.machine->n_states();
    out.qin = 0 * nq + sec.qin;  // src block
    out.qfin = 4 * nq + sec.qfin; // tgt block
    out.machine = std::make_shared<Machine>(std::move(conv));
    out.machine_name = sec.machine_name.empty() ? "" : sec.machine_name + "~mevass";
    return out;
}

std::vector<ApproxComponent> approximate_section_inner(const SectionLabel& sec0,
                                                       const Limits& lim, int depth);

/// Basic repair of one directed single-base candidate over a component
/// machine section.
void repair_and_emit(const SectionLabel& base_section, const IntVec& b,
                     const std::vector<IntVec>& periods, const Limits& lim, int depth,
                     std::vector<ApproxComponent>& out) {
    int outer = static_cast<int>(b.size());
    const Machine& inner = *base_section.machine;
    int a = inner.arity(base_section.qin);
    int bb = inner.arity(base_section.qfin);
    auto restrict_to = [&](const SemilinearSet& region) {
        SectionLabel s = base_section;
        SemilinearSet lifted = unproject(region, s.keep, a + bb);
        s.constraint = s.constraint ? intersect(*s.constraint, lifted) : lifted;
        return s;
    };
    auto point_in = [&](const IntVec& p) {
        int n_in = 0;
        for (int k : base_section.keep)
            if (k < a) ++n_in;
        IntVec x(p.begin(), p.begin() + n_in);
        IntVec y(p.begin() + n_in, p.end());
        return section_contains(base_section, x, y);
    };
    (void)outer;
    if (point_in(b)) {
        SectionLabel s = restrict_to(from_hybrid(hybrid({b}, periods)));
        out.push_back({RelationLabel::make_section(std::move(s)), linear(b, periods)});
        return;
    }
    IntVec w = zero_vec(static_cast<int>(b.size()));
    for (const IntVec& p : periods) w = add(w, p);
    if (is_zero(w)) return; // isolated non-member point
    Int shift = -1;
    for (Int mm = 1; mm <= lim.threshold_scan; ++mm) {
        if (point_in(add(b, scale(mm, w)))) {
            shift = mm;
            break;
        }
    }
    if (shift < 0) throw ResourceError("approximate_section: basic repair scan exceeded");
    IntVec b2 = add(b, scale(shift, w));
    SectionLabel s = restrict_to(from_hybrid(hybrid({b2}, periods)));
    out.push_back({RelationLabel::make_section(std::move(s)), linear(b2, periods)});
    // recurse on the lower-dimensional remainder
    SemilinearSet rem = subtract_shift(hybrid({b}, periods), scale(shift, w), lim);
    if (rem.empty()) return;
    if (depth + 1 > static_cast<int>(b.size()))
        throw ResourceError("approximate_section: remainder recursion too deep");
    SectionLabel rem_sec = restrict_to(rem);
    for (ApproxComponent& c : approximate_section_inner(rem_sec, lim, depth + 1))
        out.push_back(std::move(c));
}

std::vector<ApproxComponent> approximate_section_inner(const SectionLabel& sec0,
                                                       const Limits& lim, int depth) {
    SectionLabel sec = convert_if_vassnz(sec0);
    std::string key = "apx:" + label_key(RelationLabel::make_section(sec));
    {
        std::lock_guard<std::mutex> lock(g_memo_mutex);
        auto it = g_approx_memo.find(key);
        if (it != g_approx_memo.end()) return it->second;
    }
    DepthGuard guard(lim);
    auto [wrapped, keep] = wrap_section(sec, lim);
    std::vector<ApproxComponent> out;
    for (const PerfectComponent& pc : approximate_machine(wrapped, lim, nullptr)) {
        SemilinearSet po = project(from_hybrid(pc.over), keep);
        SectionLabel comp_sec;
        comp_sec.machine = std::make_shared<Machine>(pc.machine);
        comp_sec.qin = pc.machine.qin;
        comp_sec.qfin = pc.machine.qfin;
        comp_sec.constraint = std::nullopt;
        comp_sec.keep = keep;
        comp_sec.monotone_hint = false;
        for (const HybridLinearSet& h : po.components)
            for (const HybridLinearSet& grp : make_directed(h))
                for (const IntVec& b : grp.bases)
                    repair_and_emit(comp_sec, b, grp.periods, lim, depth, out);
    }
    {
        std::lock_guard<std::mutex> lock(g_memo_mutex);
        g_approx_memo[key] = out;
    }
    return out;
}

} // namespace

std::vector<ApproxComponent> approximate_section(const SectionLabel& sec, const Limits& lim) {
    return approximate_section_inner(sec, lim, 0);
}

bool section_contains(const SectionLabel& sec0, const IntVec& x, const IntVec& y) {
    Limits lim = limits_from_env();
    SectionLabel sec = convert_if_vassnz(sec0);
    std::string key = "pt:" + label_key(RelationLabel::make_section(sec)) + to_string(x) + ">" +
                      to_string(y);
    {
        std::lock_guard<std::mutex> lock(g_memo_mutex);
        auto it = g_point_memo.find(key);
        if (it != g_point_memo.end()) return it->second;
    }
    DepthGuard guard(lim);
    const Machine& inner = *sec.machine;
    int a = inner.arity(sec.qin);
    int b = inner.arity(sec.qfin);
    SemilinearSet point = unproject(semilinear_point(concat(x, y)), sec.keep, a + b);
    SectionLabel pinned = sec;
    pinned.constraint = pinned.constraint ? intersect(*pinned.constraint, point) : point;
    auto [wrapped, keep] = wrap_section(pinned, lim);
    (void)keep;
    bool result = !approximate_machine(wrapped, lim, nullptr).empty();
    {
        std::lock_guard<std::mutex> lock(g_memo_mutex);
        g_point_memo[key] = result;
    }
    return result;
}

} // namespace vaskit
