// SPDX-License-Identifier: Apache-2.0
#include "vaskit/semilinear.hpp"

#include <algorithm>
#include <map>

namespace vaskit {

void canonicalize(HybridLinearSet& h) {
    sort_unique(h.bases);
    h.periods.erase(std::remove_if(h.periods.begin(), h.periods.end(),
                                   [](const IntVec& p) { return is_zero(p); }),
                    h.periods.end());
    sort_unique(h.periods);
}

void canonicalize(SemilinearSet& s) {
    for (HybridLinearSet& h : s.components) canonicalize(h);
    std::sort(s.components.begin(), s.components.end(),
              [](const HybridLinearSet& a, const HybridLinearSet& b) {
                  if (a.bases != b.bases) return std::lexicographical_compare(
                      a.bases.begin(), a.bases.end(), b.bases.begin(), b.bases.end(), lex_less);
                  return std::lexicographical_compare(a.periods.begin(), a.periods.end(),
                                                      b.periods.begin(), b.periods.end(), lex_less);
              });
    s.components.erase(std::unique(s.components.begin(), s.components.end(),
                                   [](const HybridLinearSet& a, const HybridLinearSet& b) {
                                       return a.bases == b.bases && a.periods == b.periods;
                                   }),
                       s.components.end());
}

HybridLinearSet hybrid(std::vector<IntVec> bases, std::vector<IntVec> periods) {
    if (bases.empty()) throw InputError("hybrid: empty base set");
    HybridLinearSet h{std::move(bases), std::move(periods)};
    canonicalize(h);
    return h;
}

SemilinearSet semilinear_empty(int ambient) { return SemilinearSet{ambient, {}}; }

SemilinearSet semilinear_full(int ambient) {
    std::vector<IntVec> units;
    for (int i = 0; i < ambient; ++i) units.push_back(unit_vec(ambient, i));
    return SemilinearSet{ambient, {hybrid({zero_vec(ambient)}, units)}};
}

SemilinearSet semilinear_point(const IntVec& p) {
    return SemilinearSet{static_cast<int>(p.size()), {hybrid({p}, {})}};
}

SemilinearSet from_hybrid(HybridLinearSet h) {
    int n = h.ambient();
    canonicalize(h);
    return SemilinearSet{n, {std::move(h)}};
}

SemilinearSet from_linear(const LinearSet& l) {
    return from_hybrid(HybridLinearSet{{l.base}, l.periods});
}

LinearSet linear(IntVec base, std::vector<IntVec> periods) {
    LinearSet l{std::move(base), std::move(periods)};
    l.periods.erase(std::remove_if(l.periods.begin(), l.periods.end(),
                                   [](const IntVec& p) { return is_zero(p); }),
                    l.periods.end());
    sort_unique(l.periods);
    return l;
}

namespace {

/// Feasibility of base + periods . lambda = x over N.
bool linear_member(const IntVec& base, const std::vector<IntVec>& periods, const IntVec& x) {
    if (base.size() != x.size()) throw InputError("member: length mismatch");
    IntVec diff = sub(x, base);
    if (!is_nonneg(diff) && periods.empty()) return false;
    if (periods.empty()) return is_zero(diff);
    int n = static_cast<int>(x.size());
    IntMat m(n, static_cast<int>(periods.size()));
    for (int i = 0; i < n; ++i)
        for (std::size_t j = 0; j < periods.size(); ++j)
            m.at(i, static_cast<int>(j)) = periods[j][i];
    return is_feasible(LinearSystem(m, diff));
}

} // namespace

bool member(const LinearSet& l, const IntVec& x) { return linear_member(l.base, l.periods, x); }

bool member(const HybridLinearSet& h, const IntVec& x) {
    for (const IntVec& b : h.bases)
        if (linear_member(b, h.periods, x)) return true;
    return false;
}

bool member(const SemilinearSet& s, const IntVec& x) {
    if (static_cast<int>(x.size()) != s.ambient) throw InputError("member: length mismatch");
    for (const HybridLinearSet& h : s.components)
        if (member(h, x)) return true;
    return false;
}

int dimension(const HybridLinearSet& h) { return rational_rank(h.periods); }

std::optional<int> dimension(const SemilinearSet& s) {
    if (s.empty()) return std::nullopt;
    int d = 0;
    for (const HybridLinearSet& h : s.components) d = std::max(d, dimension(h));
    return d;
}

std::optional<HybridLinearSet> intersect(const HybridLinearSet& h1, const HybridLinearSet& h2) {
    if (h1.ambient() != h2.ambient()) throw InputError("intersect: ambient mismatch");
    int n = h1.ambient();
    int k1 = static_cast<int>(h1.periods.size());
    int k2 = static_cast<int>(h2.periods.size());
    IntMat m(n, k1 + k2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k1; ++j) m.at(i, j) = h1.periods[j][i];
        for (int j = 0; j < k2; ++j) m.at(i, k1 + j) = -h2.periods[j][i];
    }
    // periods of the intersection: hilbert generators mapped through h1
    std::vector<IntVec> periods;
    for (const IntVec& g : hilbert_basis(m).generators) {
        IntVec v = zero_vec(n);
        for (int j = 0; j < k1; ++j) v = add(v, scale(g[j], h1.periods[j]));
        if (!is_zero(v)) periods.push_back(v);
    }
    sort_unique(periods);
    minimize_generators(periods);
    std::vector<IntVec> points;
    for (const IntVec& b1 : h1.bases) {
        for (const IntVec& b2 : h2.bases) {
            for (const IntVec& sol : minimal_solutions(LinearSystem(m, sub(b2, b1)))) {
                IntVec v = b1;
                for (int j = 0; j < k1; ++j) v = add(v, scale(sol[j], h1.periods[j]));
                points.push_back(std::move(v));
            }
        }
    }
    if (points.empty()) return std::nullopt;
    // keep only points minimal in the monoid order
    sort_unique(points);
    std::vector<IntVec> kept;
    for (const IntVec& p : points) {
        bool redundant = false;
        for (const IntVec& q : kept)
            if (dominated(q, p) && monoid_member(sub(p, q), periods)) {
                redundant = true;
                break;
            }
        if (!redundant) kept.push_back(p);
    }
    return hybrid(std::move(kept), std::move(periods));
}

SemilinearSet intersect(const SemilinearSet& s1, const SemilinearSet& s2) {
    if (s1.ambient != s2.ambient) throw InputError("intersect: ambient mismatch");
    SemilinearSet out = semilinear_empty(s1.ambient);
    for (const HybridLinearSet& a : s1.components)
        for (const HybridLinearSet& b : s2.components)
            if (auto i = intersect(a, b)) out.components.push_back(std::move(*i));
    canonicalize(out);
    return out;
}

SemilinearSet unite(SemilinearSet s1, const SemilinearSet& s2) {
    if (s1.ambient != s2.ambient) throw InputError("unite: ambient mismatch");
    for (const HybridLinearSet& h : s2.components) s1.components.push_back(h);
    canonicalize(s1);
    return s1;
}

bool is_nondegenerate(const HybridLinearSet& a, const HybridLinearSet& b) {
    if (a.ambient() != b.ambient()) throw InputError("is_nondegenerate: ambient mismatch");
    auto i = intersect(a, b);
    if (!i) return false;
    int d = dimension(*i);
    return d == dimension(a) && d == dimension(b);
}

std::vector<HybridLinearSet> make_directed(const HybridLinearSet& h) {
    std::vector<std::vector<IntVec>> groups;
    for (const IntVec& b : h.bases) {
        bool placed = false;
        for (auto& g : groups) {
            if (z_membership(h.periods, sub(b, g.front())).has_value()) {
                g.push_back(b);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({b});
    }
    std::vector<HybridLinearSet> out;
    for (auto& g : groups) out.push_back(hybrid(std::move(g), h.periods));
    std::sort(out.begin(), out.end(), [](const HybridLinearSet& a, const HybridLinearSet& b) {
        return lex_less(a.bases.front(), b.bases.front());
    });
    return out;
}

bool is_directed(const HybridLinearSet& h) { return make_directed(h).size() <= 1; }

ConeGrid pumps_directed(const HybridLinearSet& l) {
    if (!is_directed(l)) throw InputError("pumps_directed: set is not directed");
    return ConeGrid{l.periods, l.periods};
}

bool member(const ConeGrid& cg, const IntVec& v) {
    return cone_membership(cg.cone_generators, v) &&
           z_membership(cg.grid_generators, v).has_value();
}

bool interior_member(const IntVec& w, const std::vector<IntVec>& f) {
    int n = static_cast<int>(w.size());
    for (const IntVec& g : f) {
        if (static_cast<int>(g.size()) != n) throw InputError("interior_member: length mismatch");
        // m.w - f.lambda = g feasible over N
        IntMat m(n, 1 + static_cast<int>(f.size()));
        for (int i = 0; i < n; ++i) {
            m.at(i, 0) = w[i];
            for (std::size_t j = 0; j < f.size(); ++j)
                m.at(i, 1 + static_cast<int>(j)) = -f[j][i];
        }
        if (!is_feasible(LinearSystem(m, g))) return false;
    }
    return true;
}

SemilinearSet shift(SemilinearSet s, const IntVec& v) {
    for (HybridLinearSet& h : s.components)
        for (IntVec& b : h.bases) b = add(b, v);
    return s;
}

namespace {
IntVec pick(const IntVec& x, const std::vector<int>& keep) {
    IntVec out;
    out.reserve(keep.size());
    for (int i : keep) out.push_back(x[i]);
    return out;
}
} // namespace

SemilinearSet project(const SemilinearSet& s, const std::vector<int>& keep) {
    SemilinearSet out = semilinear_empty(static_cast<int>(keep.size()));
    for (const HybridLinearSet& h : s.components) {
        HybridLinearSet g;
        for (const IntVec& b : h.bases) g.bases.push_back(pick(b, keep));
        for (const IntVec& p : h.periods) g.periods.push_back(pick(p, keep));
        canonicalize(g);
        out.components.push_back(std::move(g));
    }
    canonicalize(out);
    return out;
}

SemilinearSet unproject(const SemilinearSet& s, const std::vector<int>& keep, int ambient) {
    SemilinearSet out = semilinear_empty(ambient);
    std::vector<bool> kept(ambient, false);
    for (int i : keep) kept[i] = true;
    auto lift = [&](const IntVec& x) {
        IntVec v = zero_vec(ambient);
        for (std::size_t j = 0; j < keep.size(); ++j) v[keep[j]] = x[j];
        return v;
    };
    for (const HybridLinearSet& h : s.components) {
        HybridLinearSet g;
        for (const IntVec& b : h.bases) g.bases.push_back(lift(b));
        for (const IntVec& p : h.periods) g.periods.push_back(lift(p));
        for (int i = 0; i < ambient; ++i)
            if (!kept[i]) g.periods.push_back(unit_vec(ambient, i));
        canonicalize(g);
        out.components.push_back(std::move(g));
    }
    canonicalize(out);
    return out;
}

SemilinearSet swap_halves(const SemilinearSet& s, int n1, int n2) {
    if (s.ambient != n1 + n2) throw InputError("swap_halves: ambient mismatch");
    auto sw = [&](const IntVec& x) {
        IntVec v(x.begin() + n1, x.end());
        v.insert(v.end(), x.begin(), x.begin() + n1);
        return v;
    };
    SemilinearSet out = semilinear_empty(s.ambient);
    for (const HybridLinearSet& h : s.components) {
        HybridLinearSet g;
        for (const IntVec& b : h.bases) g.bases.push_back(sw(b));
        for (const IntVec& p : h.periods) g.periods.push_back(sw(p));
        canonicalize(g);
        out.components.push_back(std::move(g));
    }
    canonicalize(out);
    return out;
}

SemilinearSet subtract_shift(const HybridLinearSet& l, const IntVec& p, const Limits& lim) {
    if (!linear_member(zero_vec(l.ambient()), l.periods, p))
        throw InputError("subtract_shift: shift is not in N(periods)");
    SemilinearSet whole = from_hybrid(l);
    ConstraintForm inside = to_constraints(whole, lim);
    ConstraintForm shifted = to_constraints(shift(whole, p), lim);
    SemilinearSet out = to_generators(cf_intersection(inside, cf_complement(shifted, lim), lim), lim);
    auto d_out = dimension(out);
    if (d_out && *d_out >= dimension(l))
        throw InternalError("subtract_shift: dimension did not drop");
    return out;
}

std::vector<std::pair<IntVec, std::vector<IntVec>>> decompose_monoid(
    const std::vector<IntVec>& f_in, int ambient, const Limits& lim) {
    std::vector<IntVec> f = f_in;
    f.erase(std::remove_if(f.begin(), f.end(), [](const IntVec& v) { return is_zero(v); }), f.end());
    sort_unique(f);

    std::vector<std::pair<IntVec, std::vector<IntVec>>> out;
    if (rational_rank(f) == static_cast<int>(f.size())) {
        out.emplace_back(zero_vec(ambient), f);
        return out;
    }
    IntVec c;
    if (!find_integer_dependency(f, c)) throw InternalError("decompose_monoid: missing dependency");
    bool has_pos = false;
    for (const Int& v : c) has_pos = has_pos || v > 0;
    if (!has_pos)
        for (Int& v : c) v = -v;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (c[i] <= 0) continue;
        std::vector<IntVec> rest = f;
        rest.erase(rest.begin() + static_cast<long>(i));
        auto pieces = decompose_monoid(rest, ambient, lim);
        for (Int k = 0; k < c[i]; ++k) {
            for (const auto& [w, g] : pieces) {
                out.emplace_back(add(w, scale(k, f[i])), g);
                if (static_cast<std::int64_t>(out.size()) > lim.monoid_pieces)
                    throw ResourceError("decompose_monoid: piece cap exceeded");
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return lex_less(a.first, b.first);
        return std::lexicographical_compare(a.second.begin(), a.second.end(), b.second.begin(),
                                            b.second.end(), lex_less);
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<LinearSet> unambiguous_decomposition(const SemilinearSet& s, const Limits& lim) {
    // Queue of candidate pieces with independent periods; every piece popped
    // is re-differenced against the already-committed (disjoint) pieces.
    std::vector<LinearSet> done;
    std::vector<LinearSet> work;
    auto push_pieces = [&](const SemilinearSet& part) {
        for (const HybridLinearSet& h : part.components)
            for (const auto& [w, g] : decompose_monoid(h.periods, part.ambient, lim))
                for (const IntVec& b : h.bases) work.push_back(linear(add(b, w), g));
    };
    push_pieces(s);
    std::int64_t steps = 0;
    while (!work.empty()) {
        if (++steps > lim.monoid_pieces)
            throw ResourceError("unambiguous_decomposition: piece cap exceeded");
        LinearSet l = work.front();
        work.erase(work.begin());
        if (done.empty()) {
            done.push_back(l);
            continue;
        }
        SemilinearSet covered = semilinear_empty(s.ambient);
        for (const LinearSet& d : done) covered = unite(covered, from_linear(d));
        ConstraintForm remaining = cf_intersection(
            to_constraints(from_linear(l), lim), cf_complement(to_constraints(covered, lim), lim), lim);
        SemilinearSet rest = to_generators(remaining, lim);
        if (rest.empty()) continue;
        std::vector<LinearSet> fresh;
        std::swap(fresh, work);
        push_pieces(rest);
        // first new piece is disjoint from done by construction
        if (!work.empty()) {
            done.push_back(work.front());
            work.erase(work.begin());
        }
        work.insert(work.end(), fresh.begin(), fresh.end());
    }
    std::sort(done.begin(), done.end(), [](const LinearSet& a, const LinearSet& b) {
        if (a.base != b.base) return lex_less(a.base, b.base);
        return std::lexicographical_compare(a.periods.begin(), a.periods.end(), b.periods.begin(),
                                            b.periods.end(), lex_less);
    });
    return done;
}

} // namespace vaskit
