// SPDX-License-Identifier: Apache-2.0
#include "vaskit/machine.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace vaskit {

// ---------------------------------------------------------------------------
// SCC structure (Tarjan), condensation in topological order.

SccInfo scc_info(const Machine& m) {
    int n = m.n_states();
    std::vector<std::vector<int>> out_edges(n);
    for (std::size_t i = 0; i < m.edges.size(); ++i) out_edges[m.edges[i].src].push_back(static_cast<int>(i));

    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0, next_comp = 0;

    // iterative Tarjan
    struct Frame {
        int v;
        std::size_t ei;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.ei < out_edges[f.v].size()) {
                int e = out_edges[f.v][f.ei++];
                int w = m.edges[e].tgt;
                if (index[w] < 0) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if (w == f.v) break;
                    }
                    ++next_comp;
                }
                int v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }
    // Tarjan emits components in reverse topological order; flip ids.
    SccInfo info;
    info.n_comps = next_comp;
    info.comp.resize(n);
    for (int v = 0; v < n; ++v) info.comp[v] = next_comp - 1 - comp[v];
    info.states.resize(next_comp);
    for (int v = 0; v < n; ++v) info.states[info.comp[v]].push_back(v);
    info.edges.resize(next_comp);
    info.trivial.assign(next_comp, true);
    for (std::size_t i = 0; i < m.edges.size(); ++i) {
        int c1 = info.comp[m.edges[i].src], c2 = info.comp[m.edges[i].tgt];
        if (c1 == c2) {
            info.edges[c1].push_back(static_cast<int>(i));
            info.trivial[c1] = false;
        } else {
            info.bridge_edges.push_back(static_cast<int>(i));
        }
    }
    return info;
}

// ---------------------------------------------------------------------------
// Validation.

std::vector<std::string> validate(const Machine& m) {
    std::vector<std::string> diag;
    int n = m.n_states();
    auto bad = [&](const std::string& s) { diag.push_back(s); };
    if (n == 0) {
        bad("machine has no states");
        return diag;
    }
    if (m.qin < 0 || m.qin >= n || m.qfin < 0 || m.qfin >= n) bad("qin/qfin out of range");
    if (static_cast<int>(m.active.size()) != n) {
        bad("active counter table size mismatch");
        return diag;
    }
    for (int q = 0; q < n; ++q) {
        for (std::size_t i = 0; i < m.active[q].size(); ++i) {
            if (m.active[q][i] < 0 || m.active[q][i] >= m.counters)
                bad("state " + m.state_names[q] + ": active counter out of range");
            if (i > 0 && m.active[q][i - 1] >= m.active[q][i])
                bad("state " + m.state_names[q] + ": active counters not sorted");
        }
    }
    SccInfo scc = scc_info(m);
    for (int c = 0; c < scc.n_comps; ++c)
        for (int q : scc.states[c])
            if (m.active[q] != m.active[scc.states[c][0]])
                bad("active counters differ inside an SCC");
    for (std::size_t i = 0; i < m.edges.size(); ++i) {
        const Edge& e = m.edges[i];
        std::string tag = "edge " + std::to_string(i) + " (" + m.state_names[e.src] + "->" +
                          m.state_names[e.tgt] + "): ";
        if (e.src < 0 || e.src >= n || e.tgt < 0 || e.tgt >= n) {
            bad(tag + "endpoint out of range");
            continue;
        }
        bool intra = scc.comp[e.src] == scc.comp[e.tgt];
        switch (e.label.kind) {
            case EdgeLabel::Kind::Relation: {
                const RelationLabel& r = e.label.rel;
                if (r.kind == RelationLabel::Kind::Section) {
                    const SectionLabel& s = *r.section;
                    if (!s.machine) {
                        bad(tag + "section label without machine");
                        continue;
                    }
                    if (s.qin < 0 || s.qin >= s.machine->n_states() || s.qfin < 0 ||
                        s.qfin >= s.machine->n_states()) {
                        bad(tag + "section endpoints out of range");
                        continue;
                    }
                    int ab = s.machine->arity(s.qin) + s.machine->arity(s.qfin);
                    if (s.constraint && s.constraint->ambient != ab)
                        bad(tag + "section constraint ambient mismatch");
                    for (int k : s.keep)
                        if (k < 0 || k >= ab) bad(tag + "section keep index out of range");
                }
                if (r.n_in() != m.arity(e.src) || r.n_out() != m.arity(e.tgt))
                    bad(tag + "label arity mismatch");
                else if (intra && !is_monotone(r))
                    bad(tag + "non-monotone intra-SCC label");
                break;
            }
            case EdgeLabel::Kind::AddCounters: {
                if (intra) {
                    bad(tag + "counter addition inside an SCC");
                    break;
                }
                std::vector<int> expect = m.active[e.src];
                for (int c : e.label.counters) {
                    if (std::binary_search(m.active[e.src].begin(), m.active[e.src].end(), c))
                        bad(tag + "added counter already active");
                    expect.push_back(c);
                }
                std::sort(expect.begin(), expect.end());
                if (expect != m.active[e.tgt]) bad(tag + "counter addition bookkeeping mismatch");
                break;
            }
            case EdgeLabel::Kind::DeleteCounters: {
                if (intra) {
                    bad(tag + "counter deletion inside an SCC");
                    break;
                }
                std::vector<int> expect;
                for (int c : m.active[e.src])
                    if (std::find(e.label.counters.begin(), e.label.counters.end(), c) ==
                        e.label.counters.end())
                        expect.push_back(c);
                for (int c : e.label.counters)
                    if (!std::binary_search(m.active[e.src].begin(), m.active[e.src].end(), c))
                        bad(tag + "deleted counter not active");
                if (expect != m.active[e.tgt]) bad(tag + "counter deletion bookkeeping mismatch");
                break;
            }
        }
    }
    return diag;
}

// ---------------------------------------------------------------------------
// Oracle.

namespace {

std::string cfg_key(int state, const IntVec& v) {
    std::string s = std::to_string(state);
    for (const Int& x : v) {
        s += '|';
        s += x.get_str();
    }
    return s;
}

struct OracleCtx {
    Int cap;
    std::int64_t budget = 0;
    bool resource = false;
    // per (machine, qin, src-config): set of reachable config keys
    std::map<std::string, std::shared_ptr<std::unordered_set<std::string>>> reach_memo;
};

bool within_cap(const IntVec& v, const Int& cap) {
    for (const Int& x : v)
        if (x < 0 || x > cap) return false;
    return true;
}

template <typename F>
void enumerate_box(int n, const Int& cap, F&& f) {
    IntVec x(static_cast<std::size_t>(n));
    while (true) {
        f(const_cast<const IntVec&>(x));
        int i = n - 1;
        while (i >= 0 && x[i] == cap) {
            x[i] = 0;
            --i;
        }
        if (i < 0) break;
        x[i] += 1;
    }
}

bool label_holds(const Machine& m, const EdgeLabel& label, const IntVec& x, const IntVec& y,
                 const std::vector<int>& src_active, const std::vector<int>& tgt_active,
                 OracleCtx& ctx);

bool label_counter_move(const Machine& m, const Edge& e, const IntVec& x, IntVec& y);

/// BFS reach-set of inner machine from (qin, src); memoized per context.
const std::unordered_set<std::string>* reach_set(const Machine& m, int qin, const IntVec& src,
                                                 OracleCtx& ctx) {
    std::string key = machine_key(m) + "@" + cfg_key(qin, src);
    auto it = ctx.reach_memo.find(key);
    if (it != ctx.reach_memo.end()) return it->second.get();
    auto set = std::make_shared<std::unordered_set<std::string>>();
    ctx.reach_memo[key] = set;
    std::deque<Configuration> todo;
    if (within_cap(src, ctx.cap)) {
        set->insert(cfg_key(qin, src));
        todo.push_back({qin, src});
    }
    while (!todo.empty() && !ctx.resource) {
        Configuration cur = std::move(todo.front());
        todo.pop_front();
        for (std::size_t i = 0; i < m.edges.size(); ++i) {
            const Edge& e = m.edges[i];
            if (e.src != cur.state) continue;
            int n_out = static_cast<int>(m.active[e.tgt].size());
            auto try_target = [&](const IntVec& y) {
                if (!within_cap(y, ctx.cap)) return;
                if (!label_holds(m, e.label, cur.val, y, m.active[e.src], m.active[e.tgt], ctx))
                    return;
                std::string k = cfg_key(e.tgt, y);
                if (set->insert(k).second) {
                    if (--ctx.budget < 0) {
                        ctx.resource = true;
                        return;
                    }
                    todo.push_back({e.tgt, y});
                }
            };
            if (e.label.kind == EdgeLabel::Kind::Relation &&
                e.label.rel.kind == RelationLabel::Kind::Add) {
                IntVec y = add(cur.val, e.label.rel.delta);
                if (is_nonneg(y)) try_target(y);
            } else if (e.label.kind == EdgeLabel::Kind::Relation &&
                       e.label.rel.kind == RelationLabel::Kind::Nzt) {
                bool ok = true;
                for (int j = 0; j < e.label.rel.nzt_j; ++j) ok = ok && cur.val[j] == 0;
                if (ok) try_target(cur.val);
            } else if (e.label.kind == EdgeLabel::Kind::AddCounters ||
                       e.label.kind == EdgeLabel::Kind::DeleteCounters) {
                IntVec y;
                if (label_counter_move(m, e, cur.val, y)) try_target(y);
            } else {
                enumerate_box(n_out, ctx.cap, [&](const IntVec& y) {
                    if (ctx.resource) return;
                    try_target(y);
                });
            }
            if (ctx.resource) break;
        }
    }
    return set.get();
}

/// Deterministic counter add/delete moves; false when the step is disabled.
bool label_counter_move(const Machine& m, const Edge& e, const IntVec& x, IntVec& y) {
    const std::vector<int>& sa = m.active[e.src];
    const std::vector<int>& ta = m.active[e.tgt];
    if (e.label.kind == EdgeLabel::Kind::AddCounters) {
        y = zero_vec(static_cast<int>(ta.size()));
        for (std::size_t i = 0; i < sa.size(); ++i) {
            auto it = std::lower_bound(ta.begin(), ta.end(), sa[i]);
            y[it - ta.begin()] = x[i];
        }
        return true;
    }
    // delete: removed coordinates must be zero
    y.clear();
    for (std::size_t i = 0; i < sa.size(); ++i) {
        bool removed = std::find(e.label.counters.begin(), e.label.counters.end(), sa[i]) !=
                       e.label.counters.end();
        if (removed) {
            if (x[i] != 0) return false;
        } else {
            y.push_back(x[i]);
        }
    }
    return true;
}

bool section_holds(const SectionLabel& sec, const IntVec& x, const IntVec& y, OracleCtx& ctx) {
    const Machine& inner = *sec.machine;
    int a = inner.arity(sec.qin);
    int b = inner.arity(sec.qfin);
    std::vector<int> keep_src, keep_tgt;
    for (int k : sec.keep) (k < a ? keep_src : keep_tgt).push_back(k);
    std::vector<int> free_src, free_tgt;
    for (int i = 0; i < a; ++i)
        if (!std::binary_search(keep_src.begin(), keep_src.end(), i)) free_src.push_back(i);
    for (int i = a; i < a + b; ++i)
        if (!std::binary_search(keep_tgt.begin(), keep_tgt.end(), i)) free_tgt.push_back(i);

    bool found = false;
    enumerate_box(static_cast<int>(free_src.size()), ctx.cap, [&](const IntVec& fs) {
        if (found || ctx.resource) return;
        IntVec u = zero_vec(a);
        for (std::size_t i = 0; i < keep_src.size(); ++i) u[keep_src[i]] = x[i];
        for (std::size_t i = 0; i < free_src.size(); ++i) u[free_src[i]] = fs[i];
        const auto* reached = reach_set(inner, sec.qin, u, ctx);
        enumerate_box(static_cast<int>(free_tgt.size()), ctx.cap, [&](const IntVec& ft) {
            if (found || ctx.resource) return;
            IntVec v = zero_vec(b);
            for (std::size_t i = 0; i < keep_tgt.size(); ++i) v[keep_tgt[i] - a] = y[i];
            for (std::size_t i = 0; i < free_tgt.size(); ++i) v[free_tgt[i] - a] = ft[i];
            if (sec.constraint && !member(*sec.constraint, concat(u, v))) return;
            if (reached->count(cfg_key(sec.qfin, v))) found = true;
        });
    });
    return found;
}

bool label_holds(const Machine&, const EdgeLabel& label, const IntVec& x, const IntVec& y,
                 const std::vector<int>&, const std::vector<int>&, OracleCtx& ctx) {
    switch (label.kind) {
        case EdgeLabel::Kind::AddCounters:
        case EdgeLabel::Kind::DeleteCounters: {
            // resolved by the caller via label_counter_move; recheck here
            return true;
        }
        case EdgeLabel::Kind::Relation: break;
    }
    const RelationLabel& r = label.rel;
    switch (r.kind) {
        case RelationLabel::Kind::Add: return y == add(x, r.delta) && is_nonneg(y);
        case RelationLabel::Kind::Semilinear: return member(r.rel, concat(x, y));
        case RelationLabel::Kind::Nzt: {
            if (x != y) return false;
            for (int j = 0; j < r.nzt_j; ++j)
                if (x[j] != 0) return false;
            return true;
        }
        case RelationLabel::Kind::Wzt: {
            for (int i : r.wzt_src)
                if (x[i] != 0) return false;
            for (int i : r.wzt_tgt)
                if (y[i] != 0) return false;
            return true;
        }
        case RelationLabel::Kind::Section: return section_holds(*r.section, x, y, ctx);
    }
    return false;
}

} // namespace

bool oracle_step(const Machine& m, const Configuration& c, int edge_idx, const IntVec& y,
                 const Int& cap, std::int64_t budget) {
    const Edge& e = m.edges[edge_idx];
    if (e.src != c.state) return false;
    if (static_cast<int>(c.val.size()) != m.arity(e.src) ||
        static_cast<int>(y.size()) != m.arity(e.tgt))
        throw InputError("oracle_step: arity mismatch");
    OracleCtx ctx;
    ctx.cap = cap;
    ctx.budget = budget;
    if (e.label.kind != EdgeLabel::Kind::Relation) {
        IntVec want;
        return label_counter_move(m, e, c.val, want) && want == y;
    }
    bool ok = label_holds(m, e.label, c.val, y, m.active[e.src], m.active[e.tgt], ctx);
    if (ctx.resource) throw ResourceError("oracle_step: budget exceeded");
    return ok;
}

OracleResult brute_force_reach(const Machine& m, const Configuration& src,
                               const Configuration& tgt, const Int& cap, std::int64_t max_states) {
    OracleResult res;
    if (static_cast<int>(src.val.size()) != m.arity(src.state) ||
        static_cast<int>(tgt.val.size()) != m.arity(tgt.state))
        throw InputError("brute_force_reach: arity mismatch");
    OracleCtx ctx;
    ctx.cap = cap;
    ctx.budget = max_states;
    if (!within_cap(src.val, cap) || !within_cap(tgt.val, cap)) {
        res.status = OracleStatus::NotFound;
        return res;
    }
    struct Node {
        Configuration cfg;
        int parent;
        int edge;
    };
    std::vector<Node> nodes;
    std::unordered_map<std::string, int> seen;
    nodes.push_back({src, -1, -1});
    seen[cfg_key(src.state, src.val)] = 0;
    std::string target_key = cfg_key(tgt.state, tgt.val);
    int found = src.state == tgt.state && src.val == tgt.val ? 0 : -1;
    std::size_t head = 0;
    while (head < nodes.size() && found < 0 && !ctx.resource) {
        int cur = static_cast<int>(head++);
        Configuration c = nodes[cur].cfg;
        for (std::size_t i = 0; i < m.edges.size() && found < 0; ++i) {
            const Edge& e = m.edges[i];
            if (e.src != c.state) continue;
            auto consider = [&](const IntVec& y) {
                if (found >= 0 || ctx.resource) return;
                if (!within_cap(y, cap)) return;
                std::string k = cfg_key(e.tgt, y);
                if (seen.count(k)) return;
                if (static_cast<std::int64_t>(nodes.size()) >= max_states) {
                    ctx.resource = true;
                    return;
                }
                seen[k] = static_cast<int>(nodes.size());
                nodes.push_back({{e.tgt, y}, cur, static_cast<int>(i)});
                if (k == target_key) found = static_cast<int>(nodes.size()) - 1;
            };
            switch (e.label.kind) {
                case EdgeLabel::Kind::AddCounters:
                case EdgeLabel::Kind::DeleteCounters: {
                    IntVec y;
                    if (label_counter_move(m, e, c.val, y)) consider(y);
                    break;
                }
                case EdgeLabel::Kind::Relation: {
                    const RelationLabel& r = e.label.rel;
                    if (r.kind == RelationLabel::Kind::Add) {
                        IntVec y = add(c.val, r.delta);
                        if (is_nonneg(y)) consider(y);
                    } else if (r.kind == RelationLabel::Kind::Nzt) {
                        bool ok = true;
                        for (int j = 0; j < r.nzt_j; ++j) ok = ok && c.val[j] == 0;
                        if (ok) consider(c.val);
                    } else {
                        enumerate_box(m.arity(e.tgt), cap, [&](const IntVec& y) {
                            if (found >= 0 || ctx.resource) return;
                            if (label_holds(m, e.label, c.val, y, m.active[e.src], m.active[e.tgt],
                                            ctx))
                                consider(y);
                        });
                    }
                    break;
                }
            }
        }
    }
    res.explored = static_cast<std::int64_t>(nodes.size());
    if (found >= 0) {
        Run run;
        std::vector<int> chain;
        for (int v = found; v >= 0; v = nodes[v].parent) chain.push_back(v);
        std::reverse(chain.begin(), chain.end());
        for (std::size_t i = 0; i < chain.size(); ++i) {
            run.configs.push_back(nodes[chain[i]].cfg);
            if (i + 1 < chain.size()) run.edges.push_back(nodes[chain[i + 1]].edge);
        }
        res.status = OracleStatus::Found;
        res.run = std::move(run);
    } else if (ctx.resource) {
        res.status = OracleStatus::Resource;
    } else {
        res.status = OracleStatus::NotFound;
    }
    return res;
}

std::vector<Configuration> oracle_reach_set(const Machine& m, const Configuration& src,
                                            const Int& cap, std::int64_t max_states) {
    OracleCtx ctx;
    ctx.cap = cap;
    ctx.budget = max_states;
    const auto* set = reach_set(m, src.state, src.val, ctx);
    if (ctx.resource) throw ResourceError("oracle_reach_set: budget exceeded");
    std::vector<Configuration> out;
    for (const std::string& key : *set) {
        Configuration c;
        std::size_t pos = key.find('|');
        c.state = std::stoi(key.substr(0, pos == std::string::npos ? key.size() : pos));
        std::string rest = pos == std::string::npos ? "" : key.substr(pos + 1);
        while (!rest.empty()) {
            std::size_t p = rest.find('|');
            c.val.push_back(Int(rest.substr(0, p)));
            if (p == std::string::npos) break;
            rest = rest.substr(p + 1);
        }
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const Configuration& a, const Configuration& b) {
        if (a.state != b.state) return a.state < b.state;
        return lex_less(a.val, b.val);
    });
    return out;
}

bool validate_run(const Machine& m, const Run& run, const Configuration& src,
                  const Configuration& tgt, const Int& cap) {
    if (run.configs.empty()) return false;
    if (run.configs.size() != run.edges.size() + 1) return false;
    const Configuration& first = run.configs.front();
    const Configuration& last = run.configs.back();
    if (first.state != src.state || first.val != src.val) return false;
    if (last.state != tgt.state || last.val != tgt.val) return false;
    for (std::size_t i = 0; i < run.edges.size(); ++i) {
        int e = run.edges[i];
        if (e < 0 || e >= static_cast<int>(m.edges.size())) return false;
        if (m.edges[e].src != run.configs[i].state) return false;
        if (m.edges[e].tgt != run.configs[i + 1].state) return false;
        if (!oracle_step(m, run.configs[i], e, run.configs[i + 1].val, cap)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Linearize / reverse / reindex.

std::vector<Machine> linearize(const Machine& m, const Limits& lim) {
    SccInfo scc = scc_info(m);
    int c_in = scc.comp[m.qin], c_fin = scc.comp[m.qfin];
    // condensation adjacency: per (from,to) pair, the bridge edge indices
    std::map<std::pair<int, int>, std::vector<int>> bridges;
    for (int e : scc.bridge_edges)
        bridges[{scc.comp[m.edges[e].src], scc.comp[m.edges[e].tgt]}].push_back(e);

    // enumerate simple condensation paths c_in -> c_fin (DAG: topological ids)
    std::vector<std::vector<int>> paths;
    std::vector<int> cur{c_in};
    std::function<void(int)> dfs = [&](int c) {
        if (c == c_fin) {
            paths.push_back(cur);
            return;
        }
        for (const auto& [key, _] : bridges) {
            if (key.first != c) continue;
            cur.push_back(key.second);
            dfs(key.second);
            cur.pop_back();
        }
    };
    dfs(c_in);

    std::vector<Machine> out;
    for (const std::vector<int>& path : paths) {
        // choose one bridge per hop
        std::vector<std::vector<int>> options;
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            options.push_back(bridges.at({path[i], path[i + 1]}));
        std::vector<std::size_t> pick(options.size(), 0);
        while (true) {
            Machine lm;
            lm.name = m.name;
            lm.counters = m.counters;
            std::vector<int> remap(m.n_states(), -1);
            for (int c : path)
                for (int q : scc.states[c]) {
                    remap[q] = lm.n_states();
                    lm.state_names.push_back(m.state_names[q]);
                    lm.active.push_back(m.active[q]);
                }
            auto add_edge = [&](int ei) {
                Edge e = m.edges[ei];
                e.src = remap[e.src];
                e.tgt = remap[e.tgt];
                lm.edges.push_back(std::move(e));
            };
            for (int c : path)
                for (int ei : scc.edges[c]) add_edge(ei);
            for (std::size_t i = 0; i < options.size(); ++i) add_edge(options[i][pick[i]]);
            lm.qin = remap[m.qin];
            lm.qfin = remap[m.qfin];
            out.push_back(std::move(lm));
            if (static_cast<std::int64_t>(out.size()) > lim.linearize_paths)
                throw ResourceError("linearize: path cap exceeded");
            // next combination
            std::size_t i = 0;
            while (i < pick.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
            if (i == pick.size() && !options.empty()) break;
            if (options.empty()) break;
        }
    }
    return out;
}

Machine reverse_machine(const Machine& m) {
    Machine out;
    out.name = m.name.empty() ? "" : m.name + "~rev";
    out.counters = m.counters;
    out.state_names = m.state_names;
    out.active = m.active;
    out.qin = m.qfin;
    out.qfin = m.qin;
    for (const Edge& e : m.edges) {
        Edge r;
        r.src = e.tgt;
        r.tgt = e.src;
        switch (e.label.kind) {
            case EdgeLabel::Kind::Relation:
                r.label = EdgeLabel::relation(reverse_label(e.label.rel));
                break;
            case EdgeLabel::Kind::AddCounters:
                r.label = EdgeLabel::delete_counters(e.label.counters);
                break;
            case EdgeLabel::Kind::DeleteCounters:
                r.label = EdgeLabel::add_counters(e.label.counters);
                break;
        }
        out.edges.push_back(std::move(r));
    }
    return out;
}

namespace {

/// Embeds a pair relation into larger arities: old source coord i sits at
/// position src_pos[i], old target coord j at tgt_pos[j] (positions within
/// the target halves); extra coordinates are paired up (extra_src[k] with
/// extra_tgt[k]) and move diagonally.
SemilinearSet embed_pair_set(const SemilinearSet& rel, int old_a, int /*old_b*/,
                             const std::vector<int>& src_pos, const std::vector<int>& tgt_pos,
                             int new_a, int new_b, const std::vector<int>& extra_src,
                             const std::vector<int>& extra_tgt) {
    SemilinearSet out = semilinear_empty(new_a + new_b);
    auto lift = [&](const IntVec& v) {
        IntVec w = zero_vec(new_a + new_b);
        for (std::size_t i = 0; i < src_pos.size(); ++i) w[src_pos[i]] = v[i];
        for (std::size_t j = 0; j < tgt_pos.size(); ++j) w[new_a + tgt_pos[j]] = v[old_a + j];
        return w;
    };
    for (const HybridLinearSet& h : rel.components) {
        HybridLinearSet g;
        for (const IntVec& b : h.bases) g.bases.push_back(lift(b));
        for (const IntVec& p : h.periods) g.periods.push_back(lift(p));
        for (std::size_t k = 0; k < extra_src.size(); ++k) {
            IntVec d = zero_vec(new_a + new_b);
            d[extra_src[k]] = 1;
            d[new_a + extra_tgt[k]] = 1;
            g.periods.push_back(std::move(d));
        }
        canonicalize(g);
        out.components.push_back(std::move(g));
    }
    canonicalize(out);
    return out;
}

} // namespace

Machine reindex_machine(const Machine& m, int new_total, const std::vector<int>& counter_map,
                        const std::vector<int>& extra_active) {
    for (std::size_t i = 1; i < counter_map.size(); ++i)
        if (counter_map[i - 1] >= counter_map[i])
            throw InputError("reindex_machine: counter map must be strictly increasing");
    Machine out;
    out.name = m.name;
    out.counters = new_total;
    out.state_names = m.state_names;
    out.qin = m.qin;
    out.qfin = m.qfin;
    out.active.resize(m.n_states());
    for (int q = 0; q < m.n_states(); ++q) {
        std::vector<int> a;
        for (int c : m.active[q]) a.push_back(counter_map[c]);
        a.insert(a.end(), extra_active.begin(), extra_active.end());
        std::sort(a.begin(), a.end());
        out.active[q] = std::move(a);
    }
    auto positions = [&](int q) {
        // position of each old active coord and of each extra in the new list
        std::pair<std::vector<int>, std::vector<int>> res;
        const std::vector<int>& na = out.active[q];
        for (int c : m.active[q]) {
            int id = counter_map[c];
            res.first.push_back(
                static_cast<int>(std::lower_bound(na.begin(), na.end(), id) - na.begin()));
        }
        for (int id : extra_active)
            res.second.push_back(
                static_cast<int>(std::lower_bound(na.begin(), na.end(), id) - na.begin()));
        return res;
    };
    for (const Edge& e : m.edges) {
        Edge ne;
        ne.src = e.src;
        ne.tgt = e.tgt;
        auto [src_pos, src_extra] = positions(e.src);
        auto [tgt_pos, tgt_extra] = positions(e.tgt);
        int new_a = static_cast<int>(out.active[e.src].size());
        int new_b = static_cast<int>(out.active[e.tgt].size());
        switch (e.label.kind) {
            case EdgeLabel::Kind::AddCounters:
            case EdgeLabel::Kind::DeleteCounters: {
                std::vector<int> cs;
                for (int c : e.label.counters) cs.push_back(counter_map[c]);
                ne.label = e.label.kind == EdgeLabel::Kind::AddCounters
                               ? EdgeLabel::add_counters(std::move(cs))
                               : EdgeLabel::delete_counters(std::move(cs));
                break;
            }
            case EdgeLabel::Kind::Relation: {
                const RelationLabel& r = e.label.rel;
                if (r.kind == RelationLabel::Kind::Add) {
                    IntVec d = zero_vec(new_a);
                    for (std::size_t i = 0; i < src_pos.size(); ++i) d[src_pos[i]] = r.delta[i];
                    ne.label = EdgeLabel::relation(RelationLabel::add(std::move(d)));
                } else if (r.kind == RelationLabel::Kind::Section) {
                    const SectionLabel& s = *r.section;
                    int inner_n = s.machine->counters;
                    std::vector<int> idmap(inner_n);
                    for (int i = 0; i < inner_n; ++i) idmap[i] = i;
                    std::vector<int> inner_extra;
                    for (std::size_t k = 0; k < extra_active.size(); ++k)
                        inner_extra.push_back(inner_n + static_cast<int>(k));
                    Machine lifted = reindex_machine(*s.machine, inner_n + static_cast<int>(extra_active.size()),
                                                     idmap, inner_extra);
                    int old_ia = s.machine->arity(s.qin);
                    int old_ib = s.machine->arity(s.qfin);
                    int new_ia = lifted.arity(s.qin);
                    int new_ib = lifted.arity(s.qfin);
                    // old inner coords keep their ids (identity map, extras have
                    // larger ids), so their positions are unchanged
                    SectionLabel ns;
                    ns.machine = std::make_shared<Machine>(std::move(lifted));
                    ns.machine_name = s.machine_name;
                    ns.qin = s.qin;
                    ns.qfin = s.qfin;
                    std::vector<int> ipos_src, ipos_tgt, iextra_src, iextra_tgt;
                    for (int i = 0; i < old_ia; ++i) ipos_src.push_back(i);
                    for (int i = 0; i < old_ib; ++i) ipos_tgt.push_back(i);
                    for (std::size_t k = 0; k < extra_active.size(); ++k) {
                        iextra_src.push_back(old_ia + static_cast<int>(k));
                        iextra_tgt.push_back(old_ib + static_cast<int>(k));
                    }
                    if (s.constraint)
                        ns.constraint = embed_pair_set(*s.constraint, old_ia, old_ib, ipos_src,
                                                       ipos_tgt, new_ia, new_ib, iextra_src,
                                                       iextra_tgt);
                    else if (!extra_active.empty())
                        ns.constraint = embed_pair_set(semilinear_full(old_ia + old_ib), old_ia,
                                                       old_ib, ipos_src, ipos_tgt, new_ia, new_ib,
                                                       iextra_src, iextra_tgt);
                    // keep: old kept indices keep their positions; extras kept too
                    std::vector<int> keep;
                    for (int k : s.keep) keep.push_back(k < old_ia ? k : k - old_ia + new_ia);
                    for (std::size_t k = 0; k < extra_active.size(); ++k) {
                        keep.push_back(old_ia + static_cast<int>(k));
                        keep.push_back(new_ia + old_ib + static_cast<int>(k));
                    }
                    std::sort(keep.begin(), keep.end());
                    ns.keep = std::move(keep);
                    ns.monotone_hint = s.monotone_hint;
                    // outer keep order must match the outer coordinate order:
                    // extras are appended with the largest ids, hence tail
                    // positions on both sides, matching the inner tail extras.
                    ne.label = EdgeLabel::relation(RelationLabel::make_section(std::move(ns)));
                } else {
                    SemilinearSet rel = *as_semilinear(r);
                    SemilinearSet lifted = embed_pair_set(rel, r.n_in(), r.n_out(), src_pos,
                                                          tgt_pos, new_a, new_b, src_extra,
                                                          tgt_extra);
                    ne.label = EdgeLabel::relation(RelationLabel::semilinear(new_a, new_b, lifted));
                }
                break;
            }
        }
        out.edges.push_back(std::move(ne));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Effect space and rank.

std::vector<IntVec> effect_space(const Machine& m, const SccInfo& scc, int comp) {
    const std::vector<int>& edges = scc.edges[comp];
    if (edges.empty()) return {};
    int n = m.arity(scc.states[comp][0]);
    // flow matrix rows = states of the component, columns = edges
    std::vector<int> states = scc.states[comp];
    std::vector<IntVec> flow_rows(states.size(), zero_vec(static_cast<int>(edges.size())));
    for (std::size_t j = 0; j < edges.size(); ++j) {
        const Edge& e = m.edges[edges[j]];
        int si = static_cast<int>(std::find(states.begin(), states.end(), e.tgt) - states.begin());
        int so = static_cast<int>(std::find(states.begin(), states.end(), e.src) - states.begin());
        flow_rows[si][j] += 1;
        flow_rows[so][j] -= 1;
    }
    std::vector<IntVec> circulations = integer_orthogonal_basis(flow_rows, static_cast<int>(edges.size()));
    std::vector<IntVec> vecs;
    for (const IntVec& w : circulations) {
        IntVec eff = zero_vec(n);
        for (std::size_t j = 0; j < edges.size(); ++j) {
            const Edge& e = m.edges[edges[j]];
            if (!e.over) throw InputError("effect_space: unapproximated edge");
            IntVec base_eff = sub(IntVec(e.over->base.begin() + n, e.over->base.end()),
                                  IntVec(e.over->base.begin(), e.over->base.begin() + n));
            eff = add(eff, scale(w[j], base_eff));
        }
        vecs.push_back(std::move(eff));
    }
    for (int ei : edges) {
        const Edge& e = m.edges[ei];
        if (!e.over) throw InputError("effect_space: unapproximated edge");
        for (const IntVec& p : e.over->periods)
            vecs.push_back(sub(IntVec(p.begin() + n, p.end()), IntVec(p.begin(), p.begin() + n)));
    }
    return rational_span_basis(vecs);
}

bool rank_less(const Rank& a, const Rank& b) {
    if (a.v.size() != b.v.size()) throw InputError("rank_less: incomparable ranks");
    for (std::size_t i = a.v.size(); i-- > 0;) {
        if (a.v[i] != b.v[i]) return a.v[i] < b.v[i];
    }
    return false;
}

bool rank_less_eq(const Rank& a, const Rank& b) { return !rank_less(b, a); }

Rank rank_of(const Machine& m, int dim_bound) {
    Rank r;
    r.v = zero_vec(dim_bound + 1);
    SccInfo scc = scc_info(m);
    for (int c = 0; c < scc.n_comps; ++c) {
        if (scc.trivial[c]) continue;
        int d = static_cast<int>(effect_space(m, scc, c).size());
        if (d > dim_bound) throw InternalError("rank_of: dimension bound exceeded");
        r.v[d] += static_cast<int>(scc.states[c].size());
    }
    return r;
}

std::string machine_key(const Machine& m) {
    std::ostringstream os;
    os << "M{" << m.counters << ";" << m.qin << ";" << m.qfin << ";";
    for (int q = 0; q < m.n_states(); ++q) {
        os << "s" << q << "[";
        for (int c : m.active[q]) os << c << ",";
        os << "]";
    }
    for (const Edge& e : m.edges) {
        os << "e" << e.src << ">" << e.tgt << ":";
        switch (e.label.kind) {
            case EdgeLabel::Kind::AddCounters: os << "A"; break;
            case EdgeLabel::Kind::DeleteCounters: os << "D"; break;
            case EdgeLabel::Kind::Relation: os << "R" << label_key(e.label.rel); break;
        }
        if (e.label.kind != EdgeLabel::Kind::Relation)
            for (int c : e.label.counters) os << c << ",";
        os << ";";
    }
    os << "}";
    return os.str();
}

} // namespace vaskit
