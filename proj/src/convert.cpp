// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "vaskit/machine.hpp"

namespace vaskit {

bool is_vassnz(const Machine& m) {
    std::vector<int> all;
    for (int i = 0; i < m.counters; ++i) all.push_back(i);
    for (int q = 0; q < m.n_states(); ++q)
        if (m.active[q] != all) return false;
    for (const Edge& e : m.edges) {
        if (e.label.kind != EdgeLabel::Kind::Relation) return false;
        auto k = e.label.rel.kind;
        if (k != RelationLabel::Kind::Add && k != RelationLabel::Kind::Nzt) return false;
    }
    return true;
}

std::vector<int> vassnz_priorities(const Machine& m) {
    std::vector<int> out;
    for (const Edge& e : m.edges)
        if (e.label.kind == EdgeLabel::Kind::Relation &&
            e.label.rel.kind == RelationLabel::Kind::Nzt && e.label.rel.nzt_j > 0)
            out.push_back(e.label.rel.nzt_j);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SemilinearSet wzt_set(const std::vector<int>& src_zero, const std::vector<int>& tgt_zero, int a,
                      int b) {
    std::vector<IntVec> periods;
    for (int i = 0; i < a; ++i)
        if (!std::binary_search(src_zero.begin(), src_zero.end(), i))
            periods.push_back(unit_vec(a + b, i));
    for (int j = 0; j < b; ++j)
        if (!std::binary_search(tgt_zero.begin(), tgt_zero.end(), j))
            periods.push_back(unit_vec(a + b, a + j));
    return from_hybrid(hybrid({zero_vec(a + b)}, periods));
}

std::optional<std::pair<std::vector<int>, std::vector<int>>> as_wzt(const SemilinearSet& s, int a,
                                                                    int b) {
    if (s.ambient != a + b || s.components.size() != 1) return std::nullopt;
    const HybridLinearSet& h = s.components[0];
    if (h.bases != std::vector<IntVec>{zero_vec(a + b)}) return std::nullopt;
    std::vector<int> src_zero, tgt_zero;
    std::vector<bool> free_coord(a + b, false);
    for (const IntVec& p : h.periods) {
        int idx = -1;
        for (int i = 0; i < a + b; ++i) {
            if (p[i] == 0) continue;
            if (idx >= 0 || p[i] != 1) return std::nullopt;
            idx = i;
        }
        if (idx < 0) return std::nullopt;
        free_coord[idx] = true;
    }
    for (int i = 0; i < a; ++i)
        if (!free_coord[i]) src_zero.push_back(i);
    for (int j = 0; j < b; ++j)
        if (!free_coord[a + j]) tgt_zero.push_back(j);
    SemilinearSet check = wzt_set(src_zero, tgt_zero, a, b);
    SemilinearSet input = s;
    canonicalize(input);
    if (check.components.size() != 1 || check.components[0].periods != input.components[0].periods)
        return std::nullopt;
    return std::make_pair(src_zero, tgt_zero);
}

// ---------------------------------------------------------------------------
// VASSnz -> monotone eVASS (the five-block construction).

Machine vassnz_to_mevass(const Machine& m) {
    if (!is_vassnz(m)) throw InputError("vassnz_to_mevass: machine is not a VASSnz");
    int d = m.counters;
    int nq = m.n_states();
    std::vector<int> prios = vassnz_priorities(m);
    int mm = prios.empty() ? 0 : prios.back();

    // the machine with the top-priority zero tests removed
    auto sub = std::make_shared<Machine>();
    sub->name = m.name + "~lower";
    sub->counters = d;
    sub->state_names = m.state_names;
    sub->active = m.active;
    sub->qin = m.qin;
    sub->qfin = m.qfin;
    for (const Edge& e : m.edges) {
        if (e.label.rel.kind == RelationLabel::Kind::Nzt && e.label.rel.nzt_j == mm && mm > 0)
            continue;
        sub->edges.push_back(e);
    }

    Machine out;
    out.name = m.name + "~mevass";
    out.counters = d;
    // blocks: 0=src, 1=del, 2=main, 3=add, 4=tgt
    const char* tags[5] = {"src", "del", "main", "add", "tgt"};
    std::vector<int> all, high;
    for (int i = 0; i < d; ++i) all.push_back(i);
    for (int i = mm; i < d; ++i) high.push_back(i);
    for (int blk = 0; blk < 5; ++blk) {
        for (int q = 0; q < nq; ++q) {
            out.state_names.push_back(std::string(tags[blk]) + ":" + m.state_names[q]);
            out.active.push_back(blk == 2 ? high : all);
        }
    }
    auto id = [&](int blk, int q) { return blk * nq + q; };
    out.qin = id(0, m.qin);
    out.qfin = id(4, m.qfin);

    std::vector<int> keep_all;
    for (int i = 0; i < 2 * d; ++i) keep_all.push_back(i);
    std::vector<int> keep_high;
    for (int i = mm; i < d; ++i) keep_high.push_back(i);
    for (int i = d + mm; i < 2 * d; ++i) keep_high.push_back(i);

    auto zeros_both = [&]() { // u[i]=v[i]=0 for i < mm
        std::vector<IntVec> periods;
        for (int i = mm; i < d; ++i) periods.push_back(unit_vec(2 * d, i));
        for (int i = d + mm; i < 2 * d; ++i) periods.push_back(unit_vec(2 * d, i));
        return from_hybrid(hybrid({zero_vec(2 * d)}, periods));
    };
    auto zeros_tgt = [&]() { // v[i]=0 for i < mm
        std::vector<IntVec> periods;
        for (int i = 0; i < d; ++i) periods.push_back(unit_vec(2 * d, i));
        for (int i = d + mm; i < 2 * d; ++i) periods.push_back(unit_vec(2 * d, i));
        return from_hybrid(hybrid({zero_vec(2 * d)}, periods));
    };
    auto zeros_src = [&]() { // u[i]=0 for i < mm
        std::vector<IntVec> periods;
        for (int i = mm; i < d; ++i) periods.push_back(unit_vec(2 * d, i));
        for (int i = d; i < 2 * d; ++i) periods.push_back(unit_vec(2 * d, i));
        return from_hybrid(hybrid({zero_vec(2 * d)}, periods));
    };
    auto section = [&](int qa, int qb, std::optional<SemilinearSet> c, std::vector<int> keep,
                       bool mono) {
        SectionLabel s;
        s.machine = sub;
        s.machine_name = sub->name;
        s.qin = qa;
        s.qfin = qb;
        s.constraint = std::move(c);
        s.keep = std::move(keep);
        s.monotone_hint = mono;
        return EdgeLabel::relation(RelationLabel::make_section(std::move(s)));
    };

    // E1: runs without top-priority zero tests
    out.edges.push_back({id(0, m.qin), id(4, m.qfin), section(m.qin, m.qfin, std::nullopt, keep_all, false), {}});
    // E2: the zero test itself, an identity on the surviving counters
    for (const Edge& e : m.edges)
        if (e.label.rel.kind == RelationLabel::Kind::Nzt && e.label.rel.nzt_j == mm && mm > 0)
            out.edges.push_back({id(2, e.src), id(2, e.tgt),
                                 EdgeLabel::relation(RelationLabel::add(zero_vec(d - mm))), {}});
    // E3: lower-priority runs preserving zero on the deleted counters
    for (int p = 0; p < nq; ++p)
        for (int q = 0; q < nq; ++q)
            out.edges.push_back({id(2, p), id(2, q), section(p, q, zeros_both(), keep_high, true), {}});
    // E4/E5: delete and re-add the tested counters
    std::vector<int> low;
    for (int i = 0; i < mm; ++i) low.push_back(i);
    for (int q = 0; q < nq; ++q) {
        out.edges.push_back({id(1, q), id(2, q), EdgeLabel::delete_counters(low), {}});
        out.edges.push_back({id(2, q), id(3, q), EdgeLabel::add_counters(low), {}});
    }
    // E6/E7: reach the zero region / leave it
    for (int q = 0; q < nq; ++q) {
        out.edges.push_back({id(0, m.qin), id(1, q), section(m.qin, q, zeros_tgt(), keep_all, false), {}});
        out.edges.push_back({id(3, q), id(4, m.qfin), section(q, m.qfin, zeros_src(), keep_all, false), {}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Section normalization: constraint -> weak zero test via the transfer gadget.

SectionLabel normalize_section(const SectionLabel& sec, const Limits& lim) {
    if (!sec.constraint) return sec;
    const Machine& m = *sec.machine;
    int a = m.arity(sec.qin);
    int b = m.arity(sec.qfin);
    if (as_wzt(*sec.constraint, a, b)) return sec;

    int n = m.counters;
    int total = n + a + a + b;
    std::vector<int> idmap(n);
    for (int i = 0; i < n; ++i) idmap[i] = i;
    std::vector<int> extras;
    for (int i = n; i < total; ++i) extras.push_back(i);
    Machine mid = reindex_machine(m, total, idmap, extras);
    auto a_id = [&](int i) { return n + i; };
    auto c_id = [&](int i) { return n + a + i; };
    auto d_id = [&](int j) { return n + 2 * a + j; };

    Machine w;
    w.name = m.name + "~norm";
    w.counters = total;
    // pump states first, then the embedded machine, then transfer chains
    std::vector<int> entry_active = mid.active[sec.qin];
    std::vector<int> exit_active = mid.active[sec.qfin];
    int npump = a + 1;
    for (int i = 0; i <= a; ++i) {
        w.state_names.push_back("~pump" + std::to_string(i));
        w.active.push_back(entry_active);
    }
    int mbase = w.n_states();
    for (int q = 0; q < mid.n_states(); ++q) {
        w.state_names.push_back(mid.state_names[q]);
        w.active.push_back(mid.active[q]);
    }
    for (const Edge& e : mid.edges) {
        Edge ne = e;
        ne.src += mbase;
        ne.tgt += mbase;
        w.edges.push_back(std::move(ne));
    }
    auto pos_at = [&](const std::vector<int>& active, int counter) {
        auto it = std::lower_bound(active.begin(), active.end(), counter);
        return static_cast<int>(it - active.begin());
    };
    int entry_arity = static_cast<int>(entry_active.size());
    int exit_arity = static_cast<int>(exit_active.size());
    // pump chain: state i guesses the i-th source-active counter onto itself
    // and onto the A block
    for (int i = 0; i < a; ++i) {
        IntVec loop = zero_vec(entry_arity);
        loop[pos_at(entry_active, m.active[sec.qin][i])] += 1;
        loop[pos_at(entry_active, a_id(i))] += 1;
        w.edges.push_back({npump - 1 - a + i, npump - 1 - a + i, EdgeLabel::relation(RelationLabel::add(loop)), {}});
    }
    for (int i = 0; i + 1 <= a; ++i)
        w.edges.push_back({i, i + 1, EdgeLabel::relation(RelationLabel::add(zero_vec(entry_arity))), {}});
    w.edges.push_back({a, mbase + sec.qin, EdgeLabel::relation(RelationLabel::add(zero_vec(entry_arity))), {}});

    // transfer chains per constraint component and base
    auto move_vec = [&](const IntVec& pair) {
        IntVec delta = zero_vec(exit_arity);
        for (int i = 0; i < a; ++i) {
            delta[pos_at(exit_active, a_id(i))] -= pair[i];
            delta[pos_at(exit_active, c_id(i))] += pair[i];
        }
        for (int j = 0; j < b; ++j) {
            delta[pos_at(exit_active, m.active[sec.qfin][j])] -= pair[a + j];
            delta[pos_at(exit_active, d_id(j))] += pair[a + j];
        }
        return delta;
    };
    int q_end = w.n_states();
    w.state_names.push_back("~end");
    w.active.push_back(exit_active);
    (void)lim;
    for (const HybridLinearSet& comp : sec.constraint->components) {
        for (const IntVec& base : comp.bases) {
            int prev = -1;
            for (std::size_t j = 0; j <= comp.periods.size(); ++j) {
                int st = w.n_states();
                w.state_names.push_back("~xfer" + std::to_string(st));
                w.active.push_back(exit_active);
                if (j == 0) {
                    w.edges.push_back({mbase + sec.qfin, st,
                                       EdgeLabel::relation(RelationLabel::add(move_vec(base))), {}});
                } else {
                    w.edges.push_back({prev, st,
                                       EdgeLabel::relation(RelationLabel::add(zero_vec(exit_arity))), {}});
                    w.edges.push_back({st, st,
                                       EdgeLabel::relation(RelationLabel::add(move_vec(comp.periods[j - 1]))), {}});
                }
                prev = st;
            }
            w.edges.push_back({prev, q_end,
                               EdgeLabel::relation(RelationLabel::add(zero_vec(exit_arity))), {}});
        }
    }
    w.qin = 0;
    w.qfin = q_end;

    SectionLabel out;
    out.machine = std::make_shared<Machine>(std::move(w));
    out.machine_name = sec.machine_name.empty() ? "" : sec.machine_name + "~norm";
    out.qin = 0;
    out.qfin = q_end;
    std::vector<int> src_zero, tgt_zero;
    for (int i = 0; i < entry_arity; ++i) src_zero.push_back(i);
    for (int i = 0; i < exit_arity; ++i)
        if (i < pos_at(exit_active, c_id(0))) tgt_zero.push_back(i);
    out.constraint = wzt_set(src_zero, tgt_zero, entry_arity, exit_arity);
    // surviving projection: the C/D blocks at the end, filtered by the old keep
    std::vector<int> keep;
    for (int k : sec.keep) {
        if (k < a)
            keep.push_back(entry_arity + pos_at(exit_active, c_id(k)));
        else
            keep.push_back(entry_arity + pos_at(exit_active, d_id(k - a)));
    }
    std::sort(keep.begin(), keep.end());
    out.keep = std::move(keep);
    out.monotone_hint = false;
    return out;
}

std::pair<Machine, std::vector<int>> wrap_section(const SectionLabel& sec, const Limits& lim) {
    SectionLabel s = normalize_section(sec, lim);
    Machine w = *s.machine;
    w.qin = s.qin;
    w.qfin = s.qfin;
    std::vector<int> keep = s.keep;
    if (!s.constraint) return {std::move(w), std::move(keep)};
    int a = w.arity(s.qin);
    int b = w.arity(s.qfin);
    auto wzt = as_wzt(*s.constraint, a, b);
    if (!wzt) throw InternalError("wrap_section: constraint is not a weak zero test");
    auto [src_zero, tgt_zero] = *wzt;
    if (!src_zero.empty()) {
        std::vector<int> ids;
        for (int pos : src_zero) ids.push_back(w.active[s.qin][pos]);
        std::vector<int> reduced;
        for (int c : w.active[s.qin])
            if (std::find(ids.begin(), ids.end(), c) == ids.end()) reduced.push_back(c);
        int w0 = w.n_states();
        w.state_names.push_back("~zsrc0");
        w.active.push_back(w.active[s.qin]);
        int w1 = w.n_states();
        w.state_names.push_back("~zsrc1");
        w.active.push_back(reduced);
        w.edges.push_back({w0, w1, EdgeLabel::delete_counters(ids), {}});
        w.edges.push_back({w1, s.qin, EdgeLabel::add_counters(ids), {}});
        w.qin = w0;
    }
    if (!tgt_zero.empty()) {
        std::vector<int> ids;
        for (int pos : tgt_zero) ids.push_back(w.active[s.qfin][pos]);
        std::vector<int> reduced;
        for (int c : w.active[s.qfin])
            if (std::find(ids.begin(), ids.end(), c) == ids.end()) reduced.push_back(c);
        int v0 = w.n_states();
        w.state_names.push_back("~ztgt0");
        w.active.push_back(reduced);
        int v1 = w.n_states();
        w.state_names.push_back("~ztgt1");
        w.active.push_back(w.active[s.qfin]);
        w.edges.push_back({s.qfin, v0, EdgeLabel::delete_counters(ids), {}});
        w.edges.push_back({v0, v1, EdgeLabel::add_counters(ids), {}});
        w.qfin = v1;
    }
    return {std::move(w), std::move(keep)};
}

} // namespace vaskit
