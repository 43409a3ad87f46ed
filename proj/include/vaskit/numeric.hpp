// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "vaskit/common.hpp"

namespace vaskit {

using Int = mpz_class;
using Rat = mpq_class;
using IntVec = std::vector<Int>;

/// Dense row-major integer matrix.
struct IntMat {
    int rows = 0;
    int cols = 0;
    std::vector<Int> a;

    IntMat() = default;
    IntMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}

    Int& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    const Int& at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

    IntVec row(int r) const {
        IntVec out(cols);
        for (int c = 0; c < cols; ++c) out[c] = at(r, c);
        return out;
    }

    static IntMat from_rows(const std::vector<IntVec>& rows);
    /// Matrix-vector product.
    IntVec mul(const IntVec& x) const;
};

inline IntVec zero_vec(int n) { return IntVec(static_cast<std::size_t>(n)); }

IntVec unit_vec(int n, int i);
IntVec add(const IntVec& x, const IntVec& y);
IntVec sub(const IntVec& x, const IntVec& y);
IntVec scale(const Int& k, const IntVec& x);
IntVec concat(const IntVec& x, const IntVec& y);
bool is_zero(const IntVec& x);
bool is_nonneg(const IntVec& x);
/// x <= y componentwise.
bool dominated(const IntVec& x, const IntVec& y);
bool lex_less(const IntVec& x, const IntVec& y);
Int dot(const IntVec& x, const IntVec& y);

/// Sorts lexicographically and removes duplicates.
void sort_unique(std::vector<IntVec>& v);
/// Keeps only the <=-minimal elements, sorted lexicographically.
void minimal_elements(std::vector<IntVec>& v);

std::string to_string(const IntVec& x);

/// Rank over Q of the span of the given vectors (fraction-free elimination).
int rational_rank(const std::vector<IntVec>& vecs);

/// Reduced basis (echelon form over Q, scaled to primitive integer rows) of
/// the span of the given vectors. Deterministic.
std::vector<IntVec> rational_span_basis(const std::vector<IntVec>& vecs);

/// Integer basis of { u : u . v = 0 for all v in vecs } (left kernel of the
/// matrix whose rows are vecs).
std::vector<IntVec> integer_orthogonal_basis(const std::vector<IntVec>& vecs, int dim);

/// One nonzero integer relation c with sum_i c_i vecs_i = 0, if the vectors
/// are linearly dependent over Q.
bool find_integer_dependency(const std::vector<IntVec>& vecs, IntVec& out);

struct IntVecHash {
    std::size_t operator()(const IntVec& v) const {
        std::size_t h = 1469598103934665603ull;
        for (const Int& x : v) {
            std::size_t k = std::hash<long>()(mpz_fits_slong_p(x.get_mpz_t()) ? x.get_si() : 0)
                ^ std::hash<std::size_t>()(mpz_sizeinbase(x.get_mpz_t(), 2));
            h = (h ^ k) * 1099511628211ull;
        }
        return h;
    }
};

} // namespace vaskit
