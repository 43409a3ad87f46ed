// SPDX-License-Identifier: Apache-2.0
#include "vaskit/numeric.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace vaskit {

static std::int64_t env_int(const char* name, std::int64_t def) {
    const char* s = std::getenv(name);
    if (!s || !*s) return def;
    return std::strtoll(s, nullptr, 10);
}

Limits limits_from_env() {
    Limits lim;
    lim.cd_frontier = env_int("VASKIT_CD_FRONTIER", lim.cd_frontier);
    lim.linearize_paths = env_int("VASKIT_LINEARIZE_PATHS", lim.linearize_paths);
    lim.workset = env_int("VASKIT_WORKSET", lim.workset);
    lim.clean_iterations = env_int("VASKIT_CLEAN_ITERATIONS", lim.clean_iterations);
    lim.oracle_states = env_int("VASKIT_ORACLE_STATES", lim.oracle_states);
    lim.witness_states = env_int("VASKIT_WITNESS_STATES", lim.witness_states);
    lim.witness_cap = env_int("VASKIT_WITNESS_CAP", lim.witness_cap);
    lim.monoid_pieces = env_int("VASKIT_MONOID_PIECES", lim.monoid_pieces);
    lim.dnf_disjuncts = env_int("VASKIT_DNF_DISJUNCTS", lim.dnf_disjuncts);
    lim.product_states = env_int("VASKIT_PRODUCT_STATES", lim.product_states);
    lim.threshold_scan = env_int("VASKIT_THRESHOLD_SCAN", lim.threshold_scan);
    lim.engine_depth = env_int("VASKIT_ENGINE_DEPTH", lim.engine_depth);
    return lim;
}

IntMat IntMat::from_rows(const std::vector<IntVec>& rows) {
    IntMat m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (int r = 0; r < m.rows; ++r) {
        if (static_cast<int>(rows[r].size()) != m.cols)
            throw InputError("IntMat::from_rows: ragged rows");
        for (int c = 0; c < m.cols; ++c) m.at(r, c) = rows[r][c];
    }
    return m;
}

IntVec IntMat::mul(const IntVec& x) const {
    if (static_cast<int>(x.size()) != cols) throw InputError("IntMat::mul: size mismatch");
    IntVec out(rows);
    for (int r = 0; r < rows; ++r) {
        Int s = 0;
        for (int c = 0; c < cols; ++c) s += at(r, c) * x[c];
        out[r] = s;
    }
    return out;
}

IntVec unit_vec(int n, int i) {
    IntVec v(n);
    v[i] = 1;
    return v;
}

IntVec add(const IntVec& x, const IntVec& y) {
    IntVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

IntVec sub(const IntVec& x, const IntVec& y) {
    IntVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return out;
}

IntVec scale(const Int& k, const IntVec& x) {
    IntVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = k * x[i];
    return out;
}

IntVec concat(const IntVec& x, const IntVec& y) {
    IntVec out = x;
    out.insert(out.end(), y.begin(), y.end());
    return out;
}

bool is_zero(const IntVec& x) {
    for (const Int& v : x)
        if (v != 0) return false;
    return true;
}

bool is_nonneg(const IntVec& x) {
    for (const Int& v : x)
        if (v < 0) return false;
    return true;
}

bool dominated(const IntVec& x, const IntVec& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > y[i]) return false;
    return true;
}

bool lex_less(const IntVec& x, const IntVec& y) {
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] != y[i]) return x[i] < y[i];
    }
    return x.size() < y.size();
}

Int dot(const IntVec& x, const IntVec& y) {
    Int s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

void sort_unique(std::vector<IntVec>& v) {
    std::sort(v.begin(), v.end(), lex_less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void minimal_elements(std::vector<IntVec>& v) {
    sort_unique(v);
    std::vector<IntVec> out;
    for (const IntVec& x : v) {
        bool keep = true;
        for (const IntVec& y : v) {
            if (&x != &y && dominated(y, x) && y != x) {
                keep = false;
                break;
            }
        }
        if (keep) out.push_back(x);
    }
    v = std::move(out);
}

std::string to_string(const IntVec& x) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) os << ",";
        os << x[i].get_str();
    }
    os << ")";
    return os.str();
}

// Fraction-free Gaussian elimination; returns pivot columns and leaves the
// echelon rows in `work`.
static int echelonize(std::vector<IntVec>& work) {
    int rank = 0;
    if (work.empty()) return 0;
    int cols = static_cast<int>(work[0].size());
    int rows = static_cast<int>(work.size());
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (work[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(work[rank], work[piv]);
        for (int r = 0; r < rows; ++r) {
            if (r == rank || work[r][c] == 0) continue;
            Int g = gcd(work[rank][c], work[r][c]);
            Int m1 = work[rank][c] / g;
            Int m2 = work[r][c] / g;
            for (int k = 0; k < cols; ++k) work[r][k] = work[r][k] * m1 - work[rank][k] * m2;
        }
        ++rank;
    }
    work.resize(rank);
    return rank;
}

int rational_rank(const std::vector<IntVec>& vecs) {
    std::vector<IntVec> work = vecs;
    return echelonize(work);
}

std::vector<IntVec> rational_span_basis(const std::vector<IntVec>& vecs) {
    std::vector<IntVec> work = vecs;
    std::sort(work.begin(), work.end(), lex_less);
    echelonize(work);
    for (IntVec& row : work) {
        Int g = 0;
        for (const Int& v : row) g = gcd(g, v);
        if (g > 1)
            for (Int& v : row) v /= g;
        // sign-normalize on the leading entry
        for (const Int& v : row) {
            if (v == 0) continue;
            if (v < 0)
                for (Int& w : row) w = -w;
            break;
        }
    }
    std::sort(work.begin(), work.end(), lex_less);
    return work;
}

std::vector<IntVec> integer_orthogonal_basis(const std::vector<IntVec>& vecs, int dim) {
    // Solve M . u = 0 where rows of M are vecs: eliminate over Q on the
    // augmented identity to read off kernel vectors.
    std::vector<IntVec> rows;
    for (const IntVec& v : vecs) rows.push_back(v);
    // Work with columns of the identity appended to track combinations of
    // coordinates: we eliminate the transpose instead.
    // Build matrix with dim rows: row i = (vecs[0][i], vecs[1][i], ...)
    // kernel of that as row space done by echelon on [vT | I].
    int m = static_cast<int>(vecs.size());
    std::vector<IntVec> work(dim);
    for (int i = 0; i < dim; ++i) {
        work[i] = IntVec(m + dim);
        for (int j = 0; j < m; ++j) work[i][j] = vecs[j][i];
        work[i][m + i] = 1;
    }
    // Eliminate on the first m columns only.
    int rank = 0;
    for (int c = 0; c < m && rank < dim; ++c) {
        int piv = -1;
        for (int r = rank; r < dim; ++r)
            if (work[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(work[rank], work[piv]);
        for (int r = 0; r < dim; ++r) {
            if (r == rank || work[r][c] == 0) continue;
            Int g = gcd(work[rank][c], work[r][c]);
            Int m1 = work[rank][c] / g;
            Int m2 = work[r][c] / g;
            for (int k = 0; k < m + dim; ++k) work[r][k] = work[r][k] * m1 - work[rank][k] * m2;
        }
        ++rank;
    }
    std::vector<IntVec> out;
    for (int r = rank; r < dim; ++r) {
        IntVec u(dim);
        for (int i = 0; i < dim; ++i) u[i] = work[r][m + i];
        Int g = 0;
        for (const Int& v : u) g = gcd(g, v);
        if (g > 1)
            for (Int& v : u) v /= g;
        if (!is_zero(u)) out.push_back(u);
    }
    sort_unique(out);
    return out;
}

bool find_integer_dependency(const std::vector<IntVec>& vecs, IntVec& out) {
    if (vecs.empty()) return false;
    int dim = static_cast<int>(vecs[0].size());
    int m = static_cast<int>(vecs.size());
    // Kernel of the matrix whose columns are vecs: treat coefficients as the
    // unknowns. Reuse integer_orthogonal_basis on the "transposed" view.
    std::vector<IntVec> cols(dim);
    for (int i = 0; i < dim; ++i) {
        cols[i] = IntVec(m);
        for (int j = 0; j < m; ++j) cols[i][j] = vecs[j][i];
    }
    std::vector<IntVec> ker = integer_orthogonal_basis(cols, m);
    if (ker.empty()) return false;
    out = ker.front();
    return true;
}

} // namespace vaskit
