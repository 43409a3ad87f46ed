// SPDX-License-Identifier: Apache-2.0
#include "vaskit/relations.hpp"

#include <algorithm>
#include <sstream>

#include "vaskit/machine.hpp"

namespace vaskit {

namespace {

int section_in_arity(const SectionLabel& s) {
    int a = s.machine->arity(s.qin);
    int n = 0;
    for (int k : s.keep)
        if (k < a) ++n;
    return n;
}

int section_out_arity(const SectionLabel& s) {
    int a = s.machine->arity(s.qin);
    int n = 0;
    for (int k : s.keep)
        if (k >= a) ++n;
    return n;
}

} // namespace

int RelationLabel::n_in() const {
    switch (kind) {
        case Kind::Add: return static_cast<int>(delta.size());
        case Kind::Semilinear: return sl_in;
        case Kind::Nzt:
        case Kind::Wzt: return arity_n;
        case Kind::Section: return section_in_arity(*section);
    }
    return 0;
}

int RelationLabel::n_out() const {
    switch (kind) {
        case Kind::Add: return static_cast<int>(delta.size());
        case Kind::Semilinear: return sl_out;
        case Kind::Nzt:
        case Kind::Wzt: return arity_n;
        case Kind::Section: return section_out_arity(*section);
    }
    return 0;
}

RelationLabel RelationLabel::add(IntVec d) {
    RelationLabel r;
    r.kind = Kind::Add;
    r.delta = std::move(d);
    return r;
}

RelationLabel RelationLabel::semilinear(int n_in, int n_out, SemilinearSet s) {
    if (s.ambient != n_in + n_out) throw InputError("semilinear label: ambient mismatch");
    RelationLabel r;
    r.kind = Kind::Semilinear;
    r.sl_in = n_in;
    r.sl_out = n_out;
    r.rel = std::move(s);
    canonicalize(r.rel);
    return r;
}

RelationLabel RelationLabel::nzt(int j, int n) {
    if (j < 0 || j > n) throw InputError("nzt label: bad tested prefix");
    RelationLabel r;
    r.kind = Kind::Nzt;
    r.arity_n = n;
    r.nzt_j = j;
    return r;
}

RelationLabel RelationLabel::wzt(std::vector<int> src_zero, std::vector<int> tgt_zero, int n) {
    RelationLabel r;
    r.kind = Kind::Wzt;
    r.arity_n = n;
    std::sort(src_zero.begin(), src_zero.end());
    std::sort(tgt_zero.begin(), tgt_zero.end());
    r.wzt_src = std::move(src_zero);
    r.wzt_tgt = std::move(tgt_zero);
    return r;
}

RelationLabel RelationLabel::make_section(SectionLabel s) {
    RelationLabel r;
    r.kind = Kind::Section;
    r.section = std::make_shared<SectionLabel>(std::move(s));
    return r;
}

std::optional<SemilinearSet> as_semilinear(const RelationLabel& r) {
    switch (r.kind) {
        case RelationLabel::Kind::Add: {
            int n = static_cast<int>(r.delta.size());
            IntVec lo(n);
            for (int i = 0; i < n; ++i) lo[i] = r.delta[i] < 0 ? -r.delta[i] : Int(0);
            IntVec base = concat(lo, add(lo, r.delta));
            std::vector<IntVec> periods;
            for (int i = 0; i < n; ++i)
                periods.push_back(concat(unit_vec(n, i), unit_vec(n, i)));
            return from_hybrid(hybrid({base}, periods));
        }
        case RelationLabel::Kind::Semilinear: return r.rel;
        case RelationLabel::Kind::Nzt: {
            int n = r.arity_n;
            std::vector<IntVec> periods;
            for (int i = r.nzt_j; i < n; ++i)
                periods.push_back(concat(unit_vec(n, i), unit_vec(n, i)));
            return from_hybrid(hybrid({zero_vec(2 * n)}, periods));
        }
        case RelationLabel::Kind::Wzt: {
            int n = r.arity_n;
            std::vector<IntVec> periods;
            for (int i = 0; i < n; ++i) {
                if (!std::binary_search(r.wzt_src.begin(), r.wzt_src.end(), i))
                    periods.push_back(concat(unit_vec(n, i), zero_vec(n)));
                if (!std::binary_search(r.wzt_tgt.begin(), r.wzt_tgt.end(), i))
                    periods.push_back(concat(zero_vec(n), unit_vec(n, i)));
            }
            return from_hybrid(hybrid({zero_vec(2 * n)}, periods));
        }
        case RelationLabel::Kind::Section: return std::nullopt;
    }
    return std::nullopt;
}

bool contains(const RelationLabel& r, const IntVec& x, const IntVec& y) {
    if (static_cast<int>(x.size()) != r.n_in() || static_cast<int>(y.size()) != r.n_out())
        throw InputError("contains: arity mismatch");
    switch (r.kind) {
        case RelationLabel::Kind::Add: return y == add(x, r.delta) && is_nonneg(y) && is_nonneg(x);
        case RelationLabel::Kind::Semilinear: return member(r.rel, concat(x, y));
        case RelationLabel::Kind::Nzt: {
            if (x != y) return false;
            for (int i = 0; i < r.nzt_j; ++i)
                if (x[i] != 0) return false;
            return true;
        }
        case RelationLabel::Kind::Wzt: {
            for (int i : r.wzt_src)
                if (x[i] != 0) return false;
            for (int i : r.wzt_tgt)
                if (y[i] != 0) return false;
            return true;
        }
        case RelationLabel::Kind::Section: return section_contains(*r.section, x, y);
    }
    return false;
}

namespace {

/// Does every component carry every diagonal unit period?
bool has_diagonal_periods(const SemilinearSet& s, int n) {
    for (const HybridLinearSet& h : s.components) {
        for (int i = 0; i < n; ++i) {
            IntVec d = concat(unit_vec(n, i), unit_vec(n, i));
            if (!std::binary_search(h.periods.begin(), h.periods.end(), d, lex_less)) return false;
        }
    }
    return true;
}

SemilinearSet diag_augmented(SemilinearSet s, int n) {
    for (HybridLinearSet& h : s.components)
        for (int i = 0; i < n; ++i)
            h.periods.push_back(concat(unit_vec(n, i), unit_vec(n, i)));
    canonicalize(s);
    return s;
}

} // namespace

bool is_monotone(const RelationLabel& r) {
    switch (r.kind) {
        case RelationLabel::Kind::Add: return true;
        case RelationLabel::Kind::Nzt: return r.nzt_j == 0;
        case RelationLabel::Kind::Wzt: return r.wzt_src.empty() && r.wzt_tgt.empty();
        case RelationLabel::Kind::Section: return r.section->monotone_hint;
        case RelationLabel::Kind::Semilinear: break;
    }
    if (r.sl_in != r.sl_out) throw InputError("is_monotone: arity mismatch");
    int n = r.sl_in;
    if (r.rel.empty()) return true;
    if (has_diagonal_periods(r.rel, n)) return true;
    // exact: rel + (u,u) must stay inside rel for every unit u
    SemilinearSet comp = to_generators(cf_complement(to_constraints(r.rel)));
    for (int i = 0; i < n; ++i) {
        SemilinearSet shifted = shift(r.rel, concat(unit_vec(n, i), unit_vec(n, i)));
        if (!intersect(shifted, comp).empty()) return false;
    }
    return true;
}

RelationLabel intersect_semilinear(const RelationLabel& r, const SemilinearSet& s) {
    if (s.ambient != r.n_in() + r.n_out()) throw InputError("intersect_semilinear: arity mismatch");
    if (r.kind == RelationLabel::Kind::Section) {
        SectionLabel sec = *r.section;
        int a = sec.machine->arity(sec.qin);
        int b = sec.machine->arity(sec.qfin);
        SemilinearSet lifted = unproject(s, sec.keep, a + b);
        sec.constraint = sec.constraint ? intersect(*sec.constraint, lifted) : lifted;
        sec.monotone_hint = false;
        return RelationLabel::make_section(std::move(sec));
    }
    SemilinearSet rel = *as_semilinear(r);
    return RelationLabel::semilinear(r.n_in(), r.n_out(), intersect(rel, s));
}

std::vector<ApproxComponent> approximate(const RelationLabel& r, const Limits& lim) {
    if (r.kind == RelationLabel::Kind::Section) return approximate_section(*r.section, lim);
    SemilinearSet s = *as_semilinear(r);
    if (s.empty()) return {};
    int n_in = r.n_in(), n_out = r.n_out();
    if (n_in == n_out && is_monotone(r)) s = diag_augmented(std::move(s), n_in);
    std::vector<ApproxComponent> out;
    for (const HybridLinearSet& h : s.components) {
        for (const HybridLinearSet& grp : make_directed(h)) {
            for (const IntVec& b : grp.bases) {
                LinearSet over = linear(b, grp.periods);
                RelationLabel restricted =
                    RelationLabel::semilinear(n_in, n_out, from_hybrid(hybrid({b}, grp.periods)));
                out.push_back({std::move(restricted), std::move(over)});
            }
        }
    }
    return out;
}

Int asymptotic_threshold(const RelationLabel& r, const LinearSet& over, const IntVec& x,
                         const IntVec& w, const Limits& lim) {
    if (!member(over, x)) throw InputError("asymptotic_threshold: x not in over");
    if (!interior_member(w, over.periods))
        throw InputError("asymptotic_threshold: w not an interior direction");
    if (r.kind == RelationLabel::Kind::Section) {
        // iterative deepening: accept the start of the first confirmed run
        const int confirm = 8;
        int run = 0;
        Int first = 0;
        for (Int m = 0; m <= lim.threshold_scan; ++m) {
            if (contains(r, [&] {
                    IntVec p = add(x, scale(m, w));
                    return IntVec(p.begin(), p.begin() + r.n_in());
                }(),
                         [&] {
                             IntVec p = add(x, scale(m, w));
                             return IntVec(p.begin() + r.n_in(), p.end());
                         }())) {
                if (run == 0) first = m;
                if (++run > confirm) return first;
            } else {
                run = 0;
            }
        }
        throw ResourceError("asymptotic_threshold: scan cap exceeded");
    }
    SemilinearSet s = *as_semilinear(r);
    // the trace {m | x + m.w in s} is eventually periodic; compute its shape
    struct Piece {
        Int base;
        std::vector<Int> gens;
    };
    std::vector<Piece> pieces;
    for (const HybridLinearSet& h : s.components) {
        int k = static_cast<int>(h.periods.size());
        IntMat m(s.ambient, 1 + k);
        for (int i = 0; i < s.ambient; ++i) {
            m.at(i, 0) = w[i];
            for (int j = 0; j < k; ++j) m.at(i, 1 + j) = -h.periods[j][i];
        }
        for (const IntVec& b : h.bases) {
            SolutionSet sol = solve_system(LinearSystem(m, sub(b, x)), lim);
            for (const IntVec& mn : sol.minimal) {
                Piece p;
                p.base = mn[0];
                for (const IntVec& per : sol.periods)
                    if (per[0] != 0) p.gens.push_back(per[0]);
                pieces.push_back(std::move(p));
            }
        }
    }
    if (pieces.empty()) throw InputError("asymptotic_threshold: line never enters the relation");
    Int period = 1;
    Int horizon = 0;
    for (const Piece& p : pieces) {
        Int t = p.base;
        if (!p.gens.empty()) {
            Int g = 0, mx = 0;
            for (const Int& a : p.gens) {
                g = gcd(g, a);
                mx = std::max(mx, a);
            }
            period = lcm(period, g);
            t += mx * mx; // Frobenius-safe margin
        }
        horizon = std::max(horizon, Int(t + 1));
    }
    Int start = horizon + period;
    auto on_line = [&](const Int& m) { return member(s, add(x, scale(m, w))); };
    for (Int m = start; m < start + period; ++m)
        if (!on_line(m)) throw InputError("asymptotic_threshold: trace not cofinite");
    Int n = 0;
    for (Int m = start - 1; m >= 0; --m)
        if (!on_line(m)) {
            n = m + 1;
            break;
        }
    return n;
}

RelationLabel reverse_label(const RelationLabel& r) {
    switch (r.kind) {
        case RelationLabel::Kind::Add: {
            IntVec d = r.delta;
            for (Int& v : d) v = -v;
            return RelationLabel::add(std::move(d));
        }
        case RelationLabel::Kind::Semilinear:
            return RelationLabel::semilinear(r.sl_out, r.sl_in, swap_halves(r.rel, r.sl_in, r.sl_out));
        case RelationLabel::Kind::Nzt: return r;
        case RelationLabel::Kind::Wzt: return RelationLabel::wzt(r.wzt_tgt, r.wzt_src, r.arity_n);
        case RelationLabel::Kind::Section: {
            const SectionLabel& s = *r.section;
            int a = s.machine->arity(s.qin);
            int b = s.machine->arity(s.qfin);
            SectionLabel out;
            out.machine = std::make_shared<Machine>(reverse_machine(*s.machine));
            out.machine_name = s.machine_name.empty() ? "" : s.machine_name + "~rev";
            out.qin = s.qfin;
            out.qfin = s.qin;
            if (s.constraint) out.constraint = swap_halves(*s.constraint, a, b);
            for (int k : s.keep) out.keep.push_back(k < a ? k + b : k - a);
            std::sort(out.keep.begin(), out.keep.end());
            out.monotone_hint = s.monotone_hint;
            return RelationLabel::make_section(std::move(out));
        }
    }
    throw InternalError("reverse_label: bad kind");
}

namespace {

/// Constraint {(x, y) : x[coord] = sv, y[coord] = tv} over N^{n_in+n_out}.
SemilinearSet pair_fix(int n_in, int n_out, int coord, const Int& sv, const Int& tv) {
    SemilinearSet pt = semilinear_point(IntVec{sv, tv});
    return unproject(pt, {coord, n_in + coord}, n_in + n_out);
}

std::vector<int> all_but(int n, int coord) {
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
        if (i != coord) keep.push_back(i);
    return keep;
}

} // namespace

RelationLabel fix_and_drop(const RelationLabel& r, int coord, const Int& src_val,
                           const Int& tgt_val) {
    int n_in = r.n_in(), n_out = r.n_out();
    if (n_in != n_out) throw InputError("fix_and_drop: arity mismatch");
    std::vector<int> keep_pair = all_but(n_in, coord);
    for (int i = 0; i < n_out; ++i)
        if (i != coord) keep_pair.push_back(n_in + i);
    if (r.kind == RelationLabel::Kind::Add) {
        if (tgt_val - src_val != r.delta[coord] || src_val < 0 || tgt_val < 0)
            return RelationLabel::semilinear(n_in - 1, n_out - 1, semilinear_empty(2 * (n_in - 1)));
        IntVec d;
        for (int i = 0; i < n_in; ++i)
            if (i != coord) d.push_back(r.delta[i]);
        return RelationLabel::add(std::move(d));
    }
    if (r.kind == RelationLabel::Kind::Section) {
        const SectionLabel& s = *r.section;
        int a = s.machine->arity(s.qin);
        int b = s.machine->arity(s.qfin);
        // locate the inner coordinates behind outer coord on both sides
        int inner_src = s.keep[coord];
        int inner_tgt = s.keep[n_in + coord];
        SemilinearSet fix = intersect(unproject(semilinear_point(IntVec{src_val}), {inner_src}, a + b),
                                      unproject(semilinear_point(IntVec{tgt_val}), {inner_tgt}, a + b));
        SectionLabel out = s;
        out.constraint = out.constraint ? intersect(*out.constraint, fix) : fix;
        out.keep.erase(std::remove(out.keep.begin(), out.keep.end(), inner_src), out.keep.end());
        out.keep.erase(std::remove(out.keep.begin(), out.keep.end(), inner_tgt), out.keep.end());
        return RelationLabel::make_section(std::move(out));
    }
    SemilinearSet rel = *as_semilinear(r);
    SemilinearSet fixed = intersect(rel, pair_fix(n_in, n_out, coord, src_val, tgt_val));
    return RelationLabel::semilinear(n_in - 1, n_out - 1, project(fixed, keep_pair));
}

RelationLabel project_label(const RelationLabel& r, const std::vector<int>& keep_coords) {
    int n_in = r.n_in(), n_out = r.n_out();
    if (n_in != n_out) throw InputError("project_label: arity mismatch");
    std::vector<int> keep_pair = keep_coords;
    for (int i : keep_coords) keep_pair.push_back(n_in + i);
    if (r.kind == RelationLabel::Kind::Add) {
        IntVec d;
        for (int i : keep_coords) d.push_back(r.delta[i]);
        return RelationLabel::add(std::move(d));
    }
    if (r.kind == RelationLabel::Kind::Section) {
        const SectionLabel& s = *r.section;
        SectionLabel out = s;
        std::vector<int> nk;
        for (int i : keep_coords) nk.push_back(s.keep[i]);
        for (int i : keep_coords) nk.push_back(s.keep[n_in + i]);
        std::sort(nk.begin(), nk.end());
        out.keep = std::move(nk);
        return RelationLabel::make_section(std::move(out));
    }
    SemilinearSet rel = *as_semilinear(r);
    int k = static_cast<int>(keep_coords.size());
    return RelationLabel::semilinear(k, k, project(rel, keep_pair));
}

namespace {

void key_vec(std::ostringstream& os, const IntVec& v) {
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << v[i].get_str();
    }
    os << ")";
}

void key_sl(std::ostringstream& os, const SemilinearSet& s) {
    os << "sl" << s.ambient << "[";
    for (const HybridLinearSet& h : s.components) {
        os << "{B";
        for (const IntVec& b : h.bases) key_vec(os, b);
        os << "P";
        for (const IntVec& p : h.periods) key_vec(os, p);
        os << "}";
    }
    os << "]";
}

} // namespace

std::string label_key(const RelationLabel& r) {
    std::ostringstream os;
    switch (r.kind) {
        case RelationLabel::Kind::Add:
            os << "add";
            key_vec(os, r.delta);
            break;
        case RelationLabel::Kind::Semilinear:
            os << "sem" << r.sl_in << ":" << r.sl_out;
            key_sl(os, r.rel);
            break;
        case RelationLabel::Kind::Nzt: os << "nzt" << r.nzt_j << ":" << r.arity_n; break;
        case RelationLabel::Kind::Wzt: {
            os << "wzt" << r.arity_n << "[";
            for (int i : r.wzt_src) os << i << ",";
            os << "|";
            for (int i : r.wzt_tgt) os << i << ",";
            os << "]";
            break;
        }
        case RelationLabel::Kind::Section: {
            const SectionLabel& s = *r.section;
            os << "sec{" << machine_key(*s.machine) << ";" << s.qin << ";" << s.qfin << ";";
            if (s.constraint) key_sl(os, *s.constraint);
            os << ";k";
            for (int k : s.keep) os << k << ",";
            os << "}";
            break;
        }
    }
    return os.str();
}

} // namespace vaskit
