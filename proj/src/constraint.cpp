// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <optional>

#include "vaskit/semilinear.hpp"

namespace vaskit {

namespace {

Int floor_mod(const Int& a, const Int& m) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

Int ceil_div(const Int& a, const Int& b) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

bool atom_less(const IneqAtom& x, const IneqAtom& y) {
    if (x.a != y.a) return lex_less(x.a, y.a);
    return x.c < y.c;
}
bool atom_less(const ModAtom& x, const ModAtom& y) {
    if (x.a != y.a) return lex_less(x.a, y.a);
    if (x.m != y.m) return x.m < y.m;
    return x.r < y.r;
}

/// Normalizes atoms in place; returns false if the conjunction is
/// unsatisfiable on syntactic grounds.
bool canonicalize_conjunction(Conjunction& c) {
    std::vector<IneqAtom> ineqs;
    for (IneqAtom atom : c.ineqs) {
        Int g = 0;
        for (const Int& v : atom.a) g = gcd(g, v);
        if (g == 0) {
            if (atom.c > 0) return false;
            continue;
        }
        for (Int& v : atom.a) v /= g;
        atom.c = ceil_div(atom.c, g);
        ineqs.push_back(std::move(atom));
    }
    std::sort(ineqs.begin(), ineqs.end(), [](const IneqAtom& x, const IneqAtom& y) { return atom_less(x, y); });
    // same direction: keep the strongest bound
    std::vector<IneqAtom> kept;
    for (IneqAtom& atom : ineqs) {
        if (!kept.empty() && kept.back().a == atom.a)
            kept.back().c = std::max(kept.back().c, atom.c);
        else
            kept.push_back(std::move(atom));
    }
    c.ineqs = std::move(kept);

    std::vector<ModAtom> mods;
    for (ModAtom atom : c.mods) {
        if (atom.m < 1) throw InputError("mod atom with modulus < 1");
        Int g = atom.m;
        for (const Int& v : atom.a) g = gcd(g, v);
        if (g > 1) {
            if (floor_mod(atom.r, g) != 0) return false;
            for (Int& v : atom.a) v /= g;
            atom.m /= g;
            atom.r /= g;
        }
        if (atom.m == 1) continue;
        for (Int& v : atom.a) v = floor_mod(v, atom.m);
        atom.r = floor_mod(atom.r, atom.m);
        bool zero = true;
        for (const Int& v : atom.a) zero = zero && v == 0;
        if (zero) {
            if (atom.r != 0) return false;
            continue;
        }
        mods.push_back(std::move(atom));
    }
    std::sort(mods.begin(), mods.end(), [](const ModAtom& x, const ModAtom& y) { return atom_less(x, y); });
    std::vector<ModAtom> mkept;
    for (ModAtom& atom : mods) {
        if (!mkept.empty() && mkept.back().a == atom.a && mkept.back().m == atom.m) {
            if (mkept.back().r != atom.r) return false;
            continue;
        }
        mkept.push_back(std::move(atom));
    }
    c.mods = std::move(mkept);
    return true;
}

} // namespace

bool member(const ConstraintForm& c, const IntVec& x) {
    if (static_cast<int>(x.size()) != c.ambient) throw InputError("member: length mismatch");
    for (const Conjunction& conj : c.disjuncts) {
        bool ok = true;
        for (const IneqAtom& atom : conj.ineqs)
            if (dot(atom.a, x) < atom.c) {
                ok = false;
                break;
            }
        if (ok)
            for (const ModAtom& atom : conj.mods)
                if (floor_mod(dot(atom.a, x), atom.m) != atom.r) {
                    ok = false;
                    break;
                }
        if (ok) return true;
    }
    return false;
}

ConstraintForm cf_true(int ambient) { return ConstraintForm{ambient, {Conjunction{}}}; }
ConstraintForm cf_false(int ambient) { return ConstraintForm{ambient, {}}; }

ConstraintForm cf_union(ConstraintForm a, const ConstraintForm& b) {
    if (a.ambient != b.ambient) throw InputError("cf_union: ambient mismatch");
    for (const Conjunction& c : b.disjuncts) a.disjuncts.push_back(c);
    return a;
}

ConstraintForm cf_intersection(const ConstraintForm& a, const ConstraintForm& b,
                               const Limits& lim) {
    if (a.ambient != b.ambient) throw InputError("cf_intersection: ambient mismatch");
    ConstraintForm out{a.ambient, {}};
    for (const Conjunction& ca : a.disjuncts) {
        for (const Conjunction& cb : b.disjuncts) {
            Conjunction merged = ca;
            merged.ineqs.insert(merged.ineqs.end(), cb.ineqs.begin(), cb.ineqs.end());
            merged.mods.insert(merged.mods.end(), cb.mods.begin(), cb.mods.end());
            if (canonicalize_conjunction(merged)) out.disjuncts.push_back(std::move(merged));
            if (static_cast<std::int64_t>(out.disjuncts.size()) > lim.dnf_disjuncts)
                throw ResourceError("cf_intersection: disjunct cap exceeded");
        }
    }
    return out;
}

ConstraintForm cf_complement(const ConstraintForm& c, const Limits& lim) {
    ConstraintForm out = cf_true(c.ambient);
    for (const Conjunction& conj : c.disjuncts) {
        // negation of one conjunction: a disjunction of negated atoms
        std::vector<Conjunction> options;
        for (const IneqAtom& atom : conj.ineqs) {
            Conjunction o;
            IntVec na = atom.a;
            for (Int& v : na) v = -v;
            o.ineqs.push_back({std::move(na), Int(1) - atom.c});
            options.push_back(std::move(o));
        }
        for (const ModAtom& atom : conj.mods) {
            for (Int r = 0; r < atom.m; ++r) {
                if (r == atom.r) continue;
                Conjunction o;
                o.mods.push_back({atom.a, atom.m, r});
                options.push_back(std::move(o));
            }
        }
        ConstraintForm next{c.ambient, {}};
        for (const Conjunction& base : out.disjuncts) {
            for (const Conjunction& o : options) {
                Conjunction merged = base;
                merged.ineqs.insert(merged.ineqs.end(), o.ineqs.begin(), o.ineqs.end());
                merged.mods.insert(merged.mods.end(), o.mods.begin(), o.mods.end());
                if (canonicalize_conjunction(merged)) next.disjuncts.push_back(std::move(merged));
                if (static_cast<std::int64_t>(next.disjuncts.size()) > lim.dnf_disjuncts)
                    throw ResourceError("cf_complement: disjunct cap exceeded");
            }
        }
        out = std::move(next);
    }
    return out;
}

SemilinearSet to_generators(const ConstraintForm& c, const Limits& lim) {
    int n = c.ambient;
    SemilinearSet out = semilinear_empty(n);
    for (Conjunction conj : c.disjuncts) {
        if (!canonicalize_conjunction(conj)) continue;
        int s = static_cast<int>(conj.ineqs.size());
        int t = static_cast<int>(conj.mods.size());
        int vars = n + s + 2 * t;
        IntMat m(s + t, vars);
        IntVec rhs(s + t);
        for (int k = 0; k < s; ++k) {
            for (int j = 0; j < n; ++j) m.at(k, j) = conj.ineqs[k].a[j];
            m.at(k, n + k) = -1;
            rhs[k] = conj.ineqs[k].c;
        }
        for (int k = 0; k < t; ++k) {
            for (int j = 0; j < n; ++j) m.at(s + k, j) = conj.mods[k].a[j];
            m.at(s + k, n + s + 2 * k) = -conj.mods[k].m;
            m.at(s + k, n + s + 2 * k + 1) = conj.mods[k].m;
            rhs[s + k] = conj.mods[k].r;
        }
        SolutionSet sol = solve_system(LinearSystem(m, rhs), lim);
        if (!sol.feasible) continue;
        HybridLinearSet h;
        for (const IntVec& v : sol.minimal) h.bases.emplace_back(v.begin(), v.begin() + n);
        for (const IntVec& v : sol.periods) h.periods.emplace_back(v.begin(), v.begin() + n);
        canonicalize(h);
        out.components.push_back(std::move(h));
    }
    canonicalize(out);
    return out;
}

namespace {

/// Particular rational solution of rows . u = rhs (rows independent not
/// required; nullopt when inconsistent). Free variables are set to zero.
std::optional<std::vector<Rat>> solve_rational(const std::vector<IntVec>& rows,
                                               const std::vector<Rat>& rhs) {
    int k = static_cast<int>(rows.size());
    int n = k == 0 ? 0 : static_cast<int>(rows[0].size());
    std::vector<std::vector<Rat>> w(k, std::vector<Rat>(n + 1));
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < n; ++j) w[i][j] = Rat(rows[i][j]);
        w[i][n] = rhs[i];
    }
    std::vector<int> pivot_col;
    int rank = 0;
    for (int c = 0; c < n && rank < k; ++c) {
        int piv = -1;
        for (int r = rank; r < k; ++r)
            if (w[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(w[rank], w[piv]);
        Rat p = w[rank][c];
        for (int j = 0; j <= n; ++j) w[rank][j] /= p;
        for (int r = 0; r < k; ++r) {
            if (r == rank || w[r][c] == 0) continue;
            Rat f = w[r][c];
            for (int j = 0; j <= n; ++j) w[r][j] -= f * w[rank][j];
        }
        pivot_col.push_back(c);
        ++rank;
    }
    for (int r = rank; r < k; ++r)
        if (w[r][n] != 0) return std::nullopt;
    std::vector<Rat> u(n, Rat(0));
    for (int r = 0; r < rank; ++r) u[pivot_col[r]] = w[r][n];
    return u;
}

/// Constraints of c + N(g) with g linearly independent, exact.
Conjunction independent_piece_constraints(const IntVec& c, const std::vector<IntVec>& g) {
    int n = static_cast<int>(c.size());
    Conjunction out;
    // span conditions
    for (const IntVec& u : integer_orthogonal_basis(g, n)) {
        Int uc = dot(u, c);
        out.ineqs.push_back({u, uc});
        IntVec nu = u;
        for (Int& v : nu) v = -v;
        out.ineqs.push_back({std::move(nu), -uc});
    }
    // dual functionals: u_i . g_j = delta_ij (up to a positive scale)
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::vector<Rat> rhs(g.size(), Rat(0));
        rhs[i] = 1;
        auto u = solve_rational(g, rhs);
        if (!u) throw InternalError("independent_piece_constraints: dual solve failed");
        Int l = 1;
        for (const Rat& v : *u) l = lcm(l, Int(v.get_den()));
        IntVec ui(n);
        for (int j = 0; j < n; ++j) ui[j] = Int((*u)[j] * Rat(l));
        out.ineqs.push_back({ui, dot(ui, c)});
    }
    // lattice congruences via Smith form
    if (!g.empty()) {
        IntMat m(n, static_cast<int>(g.size()));
        for (int r = 0; r < n; ++r)
            for (std::size_t j = 0; j < g.size(); ++j) m.at(r, static_cast<int>(j)) = g[j][r];
        SmithForm sf = smith_form(m);
        for (int i = 0; i < sf.rank; ++i) {
            if (sf.diag[i] <= 1) continue;
            IntVec row = sf.u.row(i);
            Int r = floor_mod(dot(row, c), sf.diag[i]);
            out.mods.push_back({std::move(row), sf.diag[i], std::move(r)});
        }
    }
    return out;
}

} // namespace

ConstraintForm to_constraints(const SemilinearSet& s, const Limits& lim) {
    ConstraintForm out{s.ambient, {}};
    for (const HybridLinearSet& h : s.components) {
        auto pieces = decompose_monoid(h.periods, s.ambient, lim);
        for (const IntVec& b : h.bases) {
            for (const auto& [w, g] : pieces) {
                Conjunction conj = independent_piece_constraints(add(b, w), g);
                if (!canonicalize_conjunction(conj))
                    throw InternalError("to_constraints: inconsistent piece");
                out.disjuncts.push_back(std::move(conj));
                if (static_cast<std::int64_t>(out.disjuncts.size()) > lim.dnf_disjuncts)
                    throw ResourceError("to_constraints: disjunct cap exceeded");
            }
        }
    }
    return out;
}

} // namespace vaskit
