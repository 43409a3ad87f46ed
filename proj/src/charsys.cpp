// SPDX-License-Identifier: Apache-2.0
#include "vaskit/charsys.hpp"

#include <algorithm>

namespace vaskit {

LinearSet counter_bridge_over(const Machine& m, int edge_idx) {
    const Edge& e = m.edges[edge_idx];
    const std::vector<int>& sa = m.active[e.src];
    const std::vector<int>& ta = m.active[e.tgt];
    int a = static_cast<int>(sa.size());
    int b = static_cast<int>(ta.size());
    std::vector<IntVec> periods;
    for (int i = 0; i < a; ++i) {
        auto it = std::lower_bound(ta.begin(), ta.end(), sa[i]);
        if (it != ta.end() && *it == sa[i]) {
            int j = static_cast<int>(it - ta.begin());
            IntVec p = zero_vec(a + b);
            p[i] = 1;
            p[a + j] = 1;
            periods.push_back(std::move(p));
        }
        // deleted counters stay zero on the source side (the zero test)
    }
    if (e.label.kind == EdgeLabel::Kind::AddCounters) {
        // added counters start at zero: no free period for them
    }
    return linear(zero_vec(a + b), std::move(periods));
}

namespace {

const LinearSet& edge_over(const Machine& m, int ei, std::vector<LinearSet>& scratch) {
    const Edge& e = m.edges[ei];
    if (e.over) return *e.over;
    if (e.label.kind != EdgeLabel::Kind::Relation) {
        scratch.push_back(counter_bridge_over(m, ei));
        return scratch.back();
    }
    throw InputError("build_charsys: unapproximated edge " + std::to_string(ei));
}

} // namespace

CharSystem build_charsys(const Machine& m) {
    CharSystem cs;
    cs.scc = scc_info(m);
    int r = cs.scc.n_comps;
    cs.n_sccs = r;

    // line shape: SCC ids 0..r-1 in order, exactly one bridge per gap
    std::vector<std::vector<int>> gap_bridges(r > 0 ? r - 1 : 0);
    for (int ei : cs.scc.bridge_edges) {
        int c1 = cs.scc.comp[m.edges[ei].src];
        int c2 = cs.scc.comp[m.edges[ei].tgt];
        if (c2 != c1 + 1) throw InputError("build_charsys: machine is not a line");
        gap_bridges[c1].push_back(ei);
    }
    for (const auto& g : gap_bridges)
        if (g.size() != 1) throw InputError("build_charsys: bridge between SCCs is not unique");
    if (cs.scc.comp[m.qin] != 0 || cs.scc.comp[m.qfin] != r - 1)
        throw InputError("build_charsys: qin/qfin not at the line ends");

    cs.entry_state.resize(r);
    cs.exit_state.resize(r);
    cs.entry_state[0] = m.qin;
    cs.exit_state[r - 1] = m.qfin;
    for (int i = 0; i + 1 < r; ++i) {
        cs.exit_state[i] = m.edges[gap_bridges[i][0]].src;
        cs.entry_state[i + 1] = m.edges[gap_bridges[i][0]].tgt;
    }

    std::vector<LinearSet> scratch;
    scratch.reserve(m.edges.size());

    // variable layout: sources, targets, edge vars, periods (scc then bridge)
    int nv = 0;
    cs.src_start.resize(r);
    cs.tgt_start.resize(r);
    for (int i = 0; i < r; ++i) {
        cs.src_start[i] = nv;
        int n_i = m.arity(cs.scc.states[i][0]);
        for (int j = 0; j < n_i; ++j) cs.vars.push_back({VarInfo::Kind::Src, i, j, -1, -1});
        nv += n_i;
    }
    for (int i = 0; i < r; ++i) {
        cs.tgt_start[i] = nv;
        int n_i = m.arity(cs.scc.states[i][0]);
        for (int j = 0; j < n_i; ++j) cs.vars.push_back({VarInfo::Kind::Tgt, i, j, -1, -1});
        nv += n_i;
    }
    for (int i = 0; i < r; ++i)
        for (int ei : cs.scc.edges[i]) {
            cs.edge_var[ei] = nv++;
            cs.vars.push_back({VarInfo::Kind::EdgeCount, i, -1, ei, -1});
        }
    for (int i = 0; i < r; ++i)
        for (int ei : cs.scc.edges[i]) {
            const LinearSet& over = edge_over(m, ei, scratch);
            for (std::size_t p = 0; p < over.periods.size(); ++p) {
                cs.period_var[{ei, static_cast<int>(p)}] = nv++;
                cs.vars.push_back({VarInfo::Kind::SccPeriod, i, -1, ei, static_cast<int>(p)});
            }
        }
    for (int i = 0; i + 1 < r; ++i) {
        int ei = gap_bridges[i][0];
        const LinearSet& over = edge_over(m, ei, scratch);
        for (std::size_t p = 0; p < over.periods.size(); ++p) {
            cs.period_var[{ei, static_cast<int>(p)}] = nv++;
            cs.vars.push_back({VarInfo::Kind::BridgePeriod, i, -1, ei, static_cast<int>(p)});
        }
    }

    std::vector<IntVec> rows;
    IntVec rhs;
    auto new_row = [&]() -> IntVec& {
        rows.push_back(zero_vec(nv));
        rhs.push_back(0);
        return rows.back();
    };

    for (int i = 0; i < r; ++i) {
        int n_i = m.arity(cs.scc.states[i][0]);
        if (cs.scc.trivial[i]) {
            for (int j = 0; j < n_i; ++j) {
                IntVec& row = new_row();
                row[cs.src_start[i] + j] = 1;
                row[cs.tgt_start[i] + j] = -1;
            }
            continue;
        }
        // Euler-Kirchhoff flow equations
        for (int q : cs.scc.states[i]) {
            IntVec& row = new_row();
            for (int ei : cs.scc.edges[i]) {
                if (m.edges[ei].tgt == q) row[cs.edge_var[ei]] += 1;
                if (m.edges[ei].src == q) row[cs.edge_var[ei]] -= 1;
            }
            Int b = 0;
            if (q == cs.exit_state[i]) b += 1;
            if (q == cs.entry_state[i]) b -= 1;
            rhs.back() = b;
        }
        // effect equations: y_i - x_i = sum #(e) Effect(b(e)) + sum #(p) Effect(p)
        for (int j = 0; j < n_i; ++j) {
            IntVec& row = new_row();
            row[cs.tgt_start[i] + j] = 1;
            row[cs.src_start[i] + j] = -1;
            for (int ei : cs.scc.edges[i]) {
                const LinearSet& over = edge_over(m, ei, scratch);
                row[cs.edge_var[ei]] -= over.base[n_i + j] - over.base[j];
                for (std::size_t p = 0; p < over.periods.size(); ++p)
                    row[cs.period_var[{ei, static_cast<int>(p)}]] -=
                        over.periods[p][n_i + j] - over.periods[p][j];
            }
        }
    }
    // bridge membership: (y_i, x_{i+1}) - sum #(p) p = b(e_i)
    for (int i = 0; i + 1 < r; ++i) {
        int ei = gap_bridges[i][0];
        const LinearSet& over = edge_over(m, ei, scratch);
        int a = m.arity(m.edges[ei].src);
        int b = m.arity(m.edges[ei].tgt);
        for (int j = 0; j < a + b; ++j) {
            IntVec& row = new_row();
            if (j < a)
                row[cs.tgt_start[i] + j] = 1;
            else
                row[cs.src_start[i + 1] + (j - a)] = 1;
            for (std::size_t p = 0; p < over.periods.size(); ++p)
                row[cs.period_var[{ei, static_cast<int>(p)}]] -= over.periods[p][j];
            rhs.back() = over.base[j];
        }
    }
    cs.sys = LinearSystem(IntMat::from_rows(rows), rhs);
    return cs;
}

SolvedCharSystem solve_charsys(const CharSystem& cs, const Limits& lim) {
    SolvedCharSystem out;
    SolutionSet sol = solve_system(cs.sys, lim);
    out.feasible = sol.feasible;
    out.minimal = sol.minimal;
    out.hilbert = sol.periods;
    out.unbounded.assign(cs.vars.size(), false);
    if (!out.feasible) return out;
    for (std::size_t v = 0; v < cs.vars.size(); ++v)
        out.unbounded[v] = rational_feasible_positive(cs.sys.a, static_cast<int>(v));
    return out;
}

HybridLinearSet project_solutions(const SolvedCharSystem& s, const std::vector<int>& vars) {
    if (!s.feasible) throw InputError("project_solutions: empty solution set");
    std::vector<IntVec> bases, periods;
    for (const IntVec& m : s.minimal) {
        IntVec b;
        for (int v : vars) b.push_back(m[v]);
        bases.push_back(std::move(b));
    }
    for (const IntVec& h : s.hilbert) {
        IntVec p;
        for (int v : vars) p.push_back(h[v]);
        if (!is_zero(p)) periods.push_back(std::move(p));
    }
    return hybrid(std::move(bases), std::move(periods));
}

LinearSystem ek_constraints(const Machine& m, const SccInfo& scc, int comp, int entry, int exit,
                            bool homogeneous) {
    const std::vector<int>& edges = scc.edges[comp];
    std::vector<IntVec> rows;
    IntVec rhs;
    for (int q : scc.states[comp]) {
        IntVec row = zero_vec(static_cast<int>(edges.size()));
        for (std::size_t j = 0; j < edges.size(); ++j) {
            if (m.edges[edges[j]].tgt == q) row[j] += 1;
            if (m.edges[edges[j]].src == q) row[j] -= 1;
        }
        rows.push_back(std::move(row));
        Int b = 0;
        if (!homogeneous) {
            if (q == exit) b += 1;
            if (q == entry) b -= 1;
        }
        rhs.push_back(b);
    }
    return LinearSystem(IntMat::from_rows(rows), rhs);
}

std::vector<int> path_from_parikh(const Machine& m, const SccInfo& scc, int comp,
                                  const std::vector<Int>& w, int entry, int exit) {
    const std::vector<int>& edges = scc.edges[comp];
    if (w.size() != edges.size()) throw InputError("path_from_parikh: weight size mismatch");
    for (const Int& x : w)
        if (x < 1) throw InputError("path_from_parikh: zero edge multiplicity");
    // flow check
    LinearSystem ek = ek_constraints(m, scc, comp, entry, exit, false);
    if (ek.a.mul(w) != ek.rhs) throw InputError("path_from_parikh: flow equations violated");

    std::map<int, std::vector<std::pair<int, Int>>> remaining; // state -> (edge pos, count)
    for (std::size_t j = 0; j < edges.size(); ++j)
        remaining[m.edges[edges[j]].src].push_back({static_cast<int>(j), w[j]});

    // Hierholzer: walk greedily, splice cycles
    std::vector<int> stack{entry};
    std::vector<int> walk_edges;
    std::vector<int> path;       // final edge sequence, reversed at the end
    std::vector<int> edge_stack; // edge taken to reach stack.back()
    while (!stack.empty()) {
        int v = stack.back();
        auto& out = remaining[v];
        int pick = -1;
        for (std::size_t k = 0; k < out.size(); ++k)
            if (out[k].second > 0) {
                pick = static_cast<int>(k);
                break;
            }
        if (pick < 0) {
            stack.pop_back();
            if (!edge_stack.empty()) {
                path.push_back(edge_stack.back());
                edge_stack.pop_back();
            }
        } else {
            out[pick].second -= 1;
            int ei = edges[out[pick].first];
            stack.push_back(m.edges[ei].tgt);
            edge_stack.push_back(out[pick].first);
        }
    }
    std::reverse(path.begin(), path.end());
    // verify the Parikh image and adjacency exactly
    std::vector<Int> count(edges.size(), Int(0));
    int at = entry;
    for (int j : path) {
        int ei = edges[j];
        if (m.edges[ei].src != at) throw InternalError("path_from_parikh: adjacency broken");
        at = m.edges[ei].tgt;
        count[j] += 1;
    }
    if (at != exit || count != w) throw InternalError("path_from_parikh: wrong Parikh image");
    std::vector<int> out;
    for (int j : path) out.push_back(edges[j]);
    return out;
}

} // namespace vaskit
