// SPDX-License-Identifier: Apache-2.0
#include "vaskit/diophantine.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <unordered_set>

namespace vaskit {

std::string LinearSystem::dump() const {
    std::ostringstream os;
    for (int r = 0; r < a.rows; ++r) {
        os << "eq:";
        for (int c = 0; c < a.cols; ++c) os << " " << a.at(r, c).get_str();
        os << " | " << rhs[r].get_str() << "\n";
    }
    if (!lower.empty()) {
        os << "min:";
        for (const Int& l : lower) os << " " << l.get_str();
        os << "\n";
    }
    return os.str();
}

namespace {

/// Per-variable upper bounds valid for every N-solution, from interval
/// propagation over the equality rows. nullopt = unbounded.
std::vector<std::optional<Int>> propagate_bounds(const IntMat& a, const IntVec& rhs,
                                                 const std::vector<std::optional<Int>>& init) {
    int n = a.cols;
    std::vector<std::optional<Int>> ub = init;
    for (int round = 0; round < 8; ++round) {
        bool changed = false;
        for (int r = 0; r < a.rows; ++r) {
            for (int j = 0; j < n; ++j) {
                const Int& aj = a.at(r, j);
                if (aj == 0) continue;
                // a_j x_j = rhs_r - sum_{k != j} a_k x_k
                Int slack = rhs[r];
                bool ok = true;
                for (int k = 0; k < n && ok; ++k) {
                    if (k == j) continue;
                    const Int& ak = a.at(r, k);
                    if (aj > 0) {
                        // need an upper bound on -a_k x_k: drop positive a_k (x_k >= 0)
                        if (ak < 0) {
                            if (ub[k])
                                slack += (-ak) * (*ub[k]);
                            else
                                ok = false;
                        }
                    } else {
                        if (ak > 0) {
                            if (ub[k])
                                slack += 0; // handled below
                            else
                                ok = false;
                        }
                    }
                }
                if (!ok) continue;
                Int bound;
                if (aj > 0) {
                    if (slack < 0) return {}; // infeasible marker: empty vector
                    bound = slack / aj;
                } else {
                    // (-a_j) x_j = sum_{k != j} a_k x_k - rhs_r <= sum_{a_k>0} a_k ub_k - rhs_r
                    Int hi = -rhs[r];
                    for (int k = 0; k < n; ++k) {
                        if (k == j) continue;
                        const Int& ak = a.at(r, k);
                        if (ak > 0) hi += ak * (*ub[k]);
                    }
                    if (hi < 0) return {};
                    bound = hi / (-aj);
                }
                if (!ub[j] || *ub[j] > bound) {
                    ub[j] = bound;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return ub;
}

struct CdResult {
    std::vector<IntVec> solutions; // raw, to be minimal-filtered
    bool hit_cap = false;
};

/// Contejean-Devie completion for A.x = 0 over N. `z_col` >= 0 marks a
/// column whose value is capped at 1 (the homogenization variable);
/// `early_z1` stops at the first solution with x[z_col] == 1.
CdResult contejean_devie(const IntMat& a, int z_col, bool early_z1,
                         const std::vector<std::optional<Int>>& ub, const Limits& lim) {
    int n = a.cols;
    CdResult res;
    if (n == 0) return res;
    std::vector<IntVec> cols(n);
    for (int j = 0; j < n; ++j) {
        cols[j] = IntVec(a.rows);
        for (int r = 0; r < a.rows; ++r) cols[j][r] = a.at(r, j);
    }
    struct Node {
        IntVec x;
        IntVec val;
    };
    std::vector<Node> frontier;
    std::unordered_set<IntVec, IntVecHash> seen;
    std::vector<IntVec> sols;

    auto blocked = [&](const IntVec& x) {
        for (const IntVec& s : sols)
            if (dominated(s, x)) return true;
        return false;
    };
    auto admissible = [&](const IntVec& x) {
        if (z_col >= 0 && x[z_col] > 1) return false;
        for (int j = 0; j < n; ++j)
            if (ub[j] && x[j] > *ub[j]) return false;
        return true;
    };

    std::int64_t processed = 0;
    for (int j = 0; j < n; ++j) {
        IntVec x = unit_vec(n, j);
        if (!admissible(x)) continue;
        if (is_zero(cols[j])) {
            sols.push_back(x);
            if (early_z1 && z_col >= 0 && x[z_col] == 1) {
                res.solutions = sols;
                return res;
            }
            continue;
        }
        seen.insert(x);
        frontier.push_back({std::move(x), cols[j]});
    }

    while (!frontier.empty()) {
        std::vector<Node> next;
        for (Node& node : frontier) {
            if (++processed > lim.cd_frontier)
                throw ResourceError("contejean_devie: frontier cap exceeded");
            if (blocked(node.x)) continue;
            for (int j = 0; j < n; ++j) {
                if (dot(node.val, cols[j]) >= 0) continue;
                IntVec x2 = node.x;
                x2[j] += 1;
                if (!admissible(x2)) continue;
                if (seen.count(x2)) continue;
                IntVec v2 = add(node.val, cols[j]);
                if (is_zero(v2)) {
                    if (!blocked(x2)) {
                        sols.push_back(x2);
                        if (early_z1 && z_col >= 0 && x2[z_col] == 1) {
                            res.solutions = sols;
                            return res;
                        }
                    }
                    seen.insert(x2);
                    continue;
                }
                if (blocked(x2)) continue;
                seen.insert(x2);
                next.push_back({std::move(x2), std::move(v2)});
            }
        }
        frontier = std::move(next);
    }
    res.solutions = std::move(sols);
    return res;
}

} // namespace

HilbertBasis hilbert_basis(const IntMat& a, const Limits& lim) {
    std::vector<std::optional<Int>> ub(a.cols);
    // Homogeneous bound propagation: rows with uniform sign force zeros.
    auto prop = propagate_bounds(a, zero_vec(a.rows), ub);
    if (!prop.empty()) ub = std::move(prop);
    CdResult cd = contejean_devie(a, -1, false, ub, lim);
    minimal_elements(cd.solutions);
    HilbertBasis hb;
    for (IntVec& s : cd.solutions)
        if (!is_zero(s)) hb.generators.push_back(std::move(s));
    return hb;
}

namespace {

/// Homogenize A.x = b into [A | -b].y = 0 with the z column last; shifted by
/// lower bounds first. Returns false if trivially infeasible.
bool homogenize(const LinearSystem& sys, IntMat& aug, IntVec& shifted_rhs) {
    const IntMat& a = sys.a;
    shifted_rhs = sys.rhs;
    if (!sys.lower.empty()) {
        IntVec al = a.mul(sys.lower);
        shifted_rhs = sub(shifted_rhs, al);
    }
    aug = IntMat(a.rows, a.cols + 1);
    for (int r = 0; r < a.rows; ++r) {
        for (int c = 0; c < a.cols; ++c) aug.at(r, c) = a.at(r, c);
        aug.at(r, a.cols) = -shifted_rhs[r];
    }
    return true;
}

} // namespace

namespace {

/// Monolithic completion on the homogenized system. Fast on small systems,
/// can blow up on larger ones.
SolutionSet solve_monolithic(const IntMat& a, const IntVec& b, const Limits& lim) {
    SolutionSet out;
    int n = a.cols;
    IntMat aug(a.rows, n + 1);
    for (int r = 0; r < a.rows; ++r) {
        for (int c = 0; c < n; ++c) aug.at(r, c) = a.at(r, c);
        aug.at(r, n) = -b[r];
    }
    std::vector<std::optional<Int>> ub(n + 1);
    ub[n] = Int(1);
    auto prop = propagate_bounds(aug, zero_vec(aug.rows), ub);
    if (prop.empty()) {
        out.feasible = false;
        return out;
    }
    CdResult cd = contejean_devie(aug, n, false, prop, lim);
    minimal_elements(cd.solutions);
    for (const IntVec& s : cd.solutions) {
        IntVec x(s.begin(), s.begin() + n);
        if (s[n] == 1)
            out.minimal.push_back(std::move(x));
        else if (!is_zero(x))
            out.periods.push_back(std::move(x));
    }
    sort_unique(out.minimal);
    sort_unique(out.periods);
    out.feasible = !out.minimal.empty();
    return out;
}

/// Row-by-row recombination: keeps a generator representation of the
/// solution set of the rows processed so far and intersects with one
/// equation at a time. Each step only needs one-equation completions.
SolutionSet solve_incremental(const IntMat& a, const IntVec& b, const Limits& lim) {
    int n = a.cols;
    std::vector<IntVec> points{zero_vec(n)};
    std::vector<IntVec> periods;
    for (int i = 0; i < n; ++i) periods.push_back(unit_vec(n, i));

    for (int r = 0; r < a.rows; ++r) {
        IntVec row = a.row(r);
        int k = static_cast<int>(periods.size());
        IntMat eq(1, k);
        for (int j = 0; j < k; ++j) eq.at(0, j) = dot(row, periods[j]);
        SolutionSet hom = solve_monolithic(eq, {Int(0)}, lim);
        std::vector<IntVec> new_periods;
        for (const IntVec& mu : hom.periods) {
            IntVec v = zero_vec(n);
            for (int j = 0; j < k; ++j) v = add(v, scale(mu[j], periods[j]));
            if (!is_zero(v)) new_periods.push_back(std::move(v));
        }
        sort_unique(new_periods);
        minimize_generators(new_periods);
        std::vector<IntVec> new_points;
        for (const IntVec& p : points) {
            Int delta = b[r] - dot(row, p);
            SolutionSet par = solve_monolithic(eq, {delta}, lim);
            for (const IntVec& mu : par.minimal) {
                IntVec v = p;
                for (int j = 0; j < k; ++j) v = add(v, scale(mu[j], periods[j]));
                new_points.push_back(std::move(v));
            }
        }
        sort_unique(new_points);
        // monoid-order prune for size control
        std::vector<IntVec> kept;
        for (const IntVec& p : new_points) {
            bool redundant = false;
            for (const IntVec& q : kept)
                if (dominated(q, p) && monoid_member(sub(p, q), new_periods)) {
                    redundant = true;
                    break;
                }
            if (!redundant) kept.push_back(p);
        }
        points = std::move(kept);
        periods = std::move(new_periods);
        if (points.empty()) break;
    }
    SolutionSet out;
    out.minimal = points;
    minimal_elements(out.minimal);
    out.periods = periods;
    minimal_elements(out.periods);
    out.feasible = !out.minimal.empty();
    if (!out.feasible) out.periods.clear();
    return out;
}

} // namespace

SolutionSet solve_system(const LinearSystem& sys, const Limits& lim) {
    SolutionSet out;
    int n = sys.vars();
    if (static_cast<int>(sys.rhs.size()) != sys.a.rows)
        throw InputError("solve_system: rhs size mismatch");
    IntMat aug;
    IntVec b;
    homogenize(sys, aug, b);
    if (n == 0) {
        out.feasible = is_zero(b);
        if (out.feasible) out.minimal.push_back(IntVec{});
        return out;
    }
    if (!rational_feasible(sys.a, b)) {
        // the inhomogeneous part is empty; periods are not needed by callers
        out.feasible = false;
        return out;
    }
    if (sys.a.rows <= 1) {
        out = solve_monolithic(sys.a, b, lim);
    } else {
        try {
            Limits small = lim;
            small.cd_frontier = std::min<std::int64_t>(lim.cd_frontier, 40'000);
            out = solve_monolithic(sys.a, b, small);
        } catch (const ResourceError&) {
            out = solve_incremental(sys.a, b, lim);
        }
    }
    if (!sys.lower.empty())
        for (IntVec& m : out.minimal) m = add(m, sys.lower);
    return out;
}

std::vector<IntVec> minimal_solutions(const LinearSystem& sys, const Limits& lim) {
    return solve_system(sys, lim).minimal;
}

bool is_feasible(const LinearSystem& sys, const Limits& lim) {
    int n = sys.vars();
    IntMat aug;
    IntVec b;
    homogenize(sys, aug, b);
    if (n == 0) return is_zero(b);
    if (!rational_feasible(sys.a, b)) return false;
    std::vector<std::optional<Int>> ub(n + 1);
    ub[n] = Int(1);
    auto prop = propagate_bounds(aug, zero_vec(aug.rows), ub);
    if (prop.empty()) return false;
    try {
        Limits small = lim;
        small.cd_frontier = std::min<std::int64_t>(lim.cd_frontier, 40'000);
        CdResult cd = contejean_devie(aug, n, true, prop, small);
        for (const IntVec& s : cd.solutions)
            if (s[n] == 1) return true;
        return false;
    } catch (const ResourceError&) {
        IntVec shifted = sys.rhs;
        if (!sys.lower.empty()) shifted = sub(shifted, sys.a.mul(sys.lower));
        return solve_incremental(sys.a, shifted, lim).feasible;
    }
}

bool monoid_member(const IntVec& v, const std::vector<IntVec>& gens) {
    if (is_zero(v)) return true;
    std::unordered_set<IntVec, IntVecHash> visited;
    std::vector<IntVec> stack{v};
    int budget = 4096;
    while (!stack.empty()) {
        IntVec cur = std::move(stack.back());
        stack.pop_back();
        if (!visited.insert(cur).second) continue;
        if (--budget < 0) return false;
        for (const IntVec& g : gens) {
            if (!dominated(g, cur) || is_zero(g)) continue;
            IntVec rest = sub(cur, g);
            if (is_zero(rest)) return true;
            stack.push_back(std::move(rest));
        }
    }
    return false;
}

void minimize_generators(std::vector<IntVec>& gens) {
    sort_unique(gens);
    std::vector<IntVec> kept;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        std::vector<IntVec> others;
        for (std::size_t j = 0; j < gens.size(); ++j)
            if (j != i) others.push_back(gens[j]);
        // keep only what the remaining kept prefix plus the untested suffix
        // cannot produce
        if (!monoid_member(gens[i], others)) kept.push_back(gens[i]);
    }
    if (kept.size() != gens.size()) {
        // re-check against the reduced set so dropped generators stay covered
        std::vector<IntVec> fixed;
        for (const IntVec& g : gens)
            if (std::find(kept.begin(), kept.end(), g) != kept.end() ||
                !monoid_member(g, kept))
                fixed.push_back(g);
        sort_unique(fixed);
        gens = std::move(fixed);
    } else {
        gens = std::move(kept);
    }
}

bool is_unbounded(const LinearSystem& sys, int var, const Limits& lim) {
    if (var < 0 || var >= sys.vars()) throw InputError("is_unbounded: bad variable index");
    if (!is_feasible(sys, lim)) throw InputError("is_unbounded: system is infeasible");
    return rational_feasible_positive(sys.a, var);
}

std::vector<IntVec> bounded_values(const LinearSystem& sys, const std::vector<int>& vars,
                                   const Limits& lim) {
    for (int v : vars)
        if (is_unbounded(sys, v, lim))
            throw InputError("bounded_values: variable " + std::to_string(v) + " is unbounded");
    SolutionSet sol = solve_system(sys, lim);
    std::vector<IntVec> out;
    for (const IntVec& p : sol.periods)
        for (int v : vars)
            if (p[v] != 0) throw InternalError("bounded_values: period touches bounded variable");
    for (const IntVec& m : sol.minimal) {
        IntVec t;
        t.reserve(vars.size());
        for (int v : vars) t.push_back(m[v]);
        out.push_back(std::move(t));
    }
    sort_unique(out);
    return out;
}

// ---------------------------------------------------------------------------
// Exact rational phase-1 simplex.

namespace {

struct Tableau {
    int rows, cols; // cols = structural + artificials
    std::vector<std::vector<Rat>> t; // rows x (cols + 1), last col = rhs
    std::vector<int> basis;
};

bool phase1(Tableau& tb, int structural) {
    int r = tb.rows, n = tb.cols;
    // reduced costs for minimizing the sum of artificials
    auto reduced_cost = [&](int j) {
        Rat rc = j >= structural ? 1 : 0;
        for (int i = 0; i < r; ++i)
            if (tb.basis[i] >= structural) rc -= tb.t[i][j];
        return rc;
    };
    while (true) {
        int enter = -1;
        for (int j = 0; j < n; ++j) {
            bool in_basis = false;
            for (int i = 0; i < r; ++i)
                if (tb.basis[i] == j) {
                    in_basis = true;
                    break;
                }
            if (in_basis) continue;
            if (reduced_cost(j) < 0) {
                enter = j;
                break; // Bland
            }
        }
        if (enter < 0) break;
        int leave = -1;
        Rat best;
        for (int i = 0; i < r; ++i) {
            if (tb.t[i][enter] > 0) {
                Rat ratio = tb.t[i][n] / tb.t[i][enter];
                if (leave < 0 || ratio < best ||
                    (ratio == best && tb.basis[i] < tb.basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) throw InternalError("phase1: unbounded artificial objective");
        // pivot
        Rat piv = tb.t[leave][enter];
        for (int j = 0; j <= n; ++j) tb.t[leave][j] /= piv;
        for (int i = 0; i < r; ++i) {
            if (i == leave || tb.t[i][enter] == 0) continue;
            Rat f = tb.t[i][enter];
            for (int j = 0; j <= n; ++j) tb.t[i][j] -= f * tb.t[leave][j];
        }
        tb.basis[leave] = enter;
    }
    Rat obj = 0;
    for (int i = 0; i < r; ++i)
        if (tb.basis[i] >= structural) obj += tb.t[i][n];
    return obj == 0;
}

} // namespace

bool rational_feasible(const IntMat& a, const IntVec& rhs) {
    int r = a.rows, n = a.cols;
    if (n == 0) return is_zero(rhs);
    Tableau tb;
    tb.rows = r;
    tb.cols = n + r;
    tb.t.assign(r, std::vector<Rat>(n + r + 1, 0));
    tb.basis.resize(r);
    for (int i = 0; i < r; ++i) {
        int sign = rhs[i] < 0 ? -1 : 1;
        for (int j = 0; j < n; ++j) tb.t[i][j] = Rat(sign * a.at(i, j));
        tb.t[i][n + i] = 1;
        tb.t[i][n + r] = Rat(sign * rhs[i]);
        tb.basis[i] = n + i;
    }
    return phase1(tb, n);
}

bool rational_feasible_positive(const IntMat& a, int var) {
    // x[var] = 1 + x'[var]
    IntVec rhs(a.rows);
    for (int r = 0; r < a.rows; ++r) rhs[r] = -a.at(r, var);
    return rational_feasible(a, rhs);
}

// ---------------------------------------------------------------------------
// Smith normal form and integer lattice membership.

namespace {

void swap_rows(IntMat& m, int i, int j) {
    for (int c = 0; c < m.cols; ++c) std::swap(m.at(i, c), m.at(j, c));
}
void swap_cols(IntMat& m, int i, int j) {
    for (int r = 0; r < m.rows; ++r) std::swap(m.at(r, i), m.at(r, j));
}
void add_row(IntMat& m, int dst, int src, const Int& k) {
    for (int c = 0; c < m.cols; ++c) m.at(dst, c) += k * m.at(src, c);
}
void add_col(IntMat& m, int dst, int src, const Int& k) {
    for (int r = 0; r < m.rows; ++r) m.at(r, dst) += k * m.at(r, src);
}
void negate_row(IntMat& m, int i) {
    for (int c = 0; c < m.cols; ++c) m.at(i, c) = -m.at(i, c);
}

IntMat identity(int n) {
    IntMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

} // namespace

SmithForm smith_form(const IntMat& input) {
    SmithForm sf;
    IntMat d = input;
    int rows = d.rows, cols = d.cols;
    sf.u = identity(rows);
    sf.v = identity(cols);
    int t = 0;
    while (t < rows && t < cols) {
        // find minimal-|.| nonzero pivot in the submatrix
        int pr = -1, pc = -1;
        Int best;
        for (int r = t; r < rows; ++r)
            for (int c = t; c < cols; ++c) {
                const Int& x = d.at(r, c);
                if (x == 0) continue;
                Int ax = abs(x);
                if (pr < 0 || ax < best) {
                    best = ax;
                    pr = r;
                    pc = c;
                }
            }
        if (pr < 0) break;
        if (pr != t) {
            swap_rows(d, pr, t);
            swap_rows(sf.u, pr, t);
        }
        if (pc != t) {
            swap_cols(d, pc, t);
            swap_cols(sf.v, pc, t);
        }
        bool dirty = false;
        for (int r = t + 1; r < rows; ++r) {
            if (d.at(r, t) == 0) continue;
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), d.at(r, t).get_mpz_t(), d.at(t, t).get_mpz_t());
            add_row(d, r, t, -q);
            add_row(sf.u, r, t, -q);
            if (d.at(r, t) != 0) dirty = true;
        }
        for (int c = t + 1; c < cols; ++c) {
            if (d.at(t, c) == 0) continue;
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), d.at(t, c).get_mpz_t(), d.at(t, t).get_mpz_t());
            add_col(d, c, t, -q);
            add_col(sf.v, c, t, -q);
            if (d.at(t, c) != 0) dirty = true;
        }
        if (dirty) continue;
        // divisibility fix
        bool fixed = true;
        for (int r = t + 1; r < rows && fixed; ++r)
            for (int c = t + 1; c < cols && fixed; ++c)
                if (d.at(r, c) % d.at(t, t) != 0) {
                    add_row(d, t, r, 1);
                    add_row(sf.u, t, r, 1);
                    fixed = false;
                }
        if (!fixed) continue;
        if (d.at(t, t) < 0) {
            negate_row(d, t);
            negate_row(sf.u, t);
        }
        ++t;
    }
    sf.rank = t;
    for (int i = 0; i < t; ++i) sf.diag.push_back(d.at(i, i));
    return sf;
}

std::optional<IntVec> z_membership(const std::vector<IntVec>& f, const IntVec& v) {
    int n = static_cast<int>(v.size());
    int m = static_cast<int>(f.size());
    if (m == 0) {
        if (is_zero(v)) return IntVec{};
        return std::nullopt;
    }
    IntMat mat(n, m);
    for (int j = 0; j < m; ++j) {
        if (static_cast<int>(f[j].size()) != n) throw InputError("z_membership: length mismatch");
        for (int i = 0; i < n; ++i) mat.at(i, j) = f[j][i];
    }
    SmithForm sf = smith_form(mat);
    IntVec uv = sf.u.mul(v);
    IntVec mu(m);
    for (int i = 0; i < n; ++i) {
        if (i < sf.rank) {
            if (uv[i] % sf.diag[i] != 0) return std::nullopt;
            mu[i] = uv[i] / sf.diag[i];
        } else if (uv[i] != 0) {
            return std::nullopt;
        }
    }
    IntVec lambda = sf.v.mul(mu);
    return lambda;
}

bool cone_membership(const std::vector<IntVec>& f, const IntVec& v) {
    int n = static_cast<int>(v.size());
    int m = static_cast<int>(f.size());
    if (m == 0) return is_zero(v);
    IntMat mat(n, m);
    for (int j = 0; j < m; ++j) {
        if (static_cast<int>(f[j].size()) != n) throw InputError("cone_membership: length mismatch");
        for (int i = 0; i < n; ++i) mat.at(i, j) = f[j][i];
    }
    return rational_feasible(mat, v);
}

} // namespace vaskit
