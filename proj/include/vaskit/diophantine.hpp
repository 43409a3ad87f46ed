// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vaskit/numeric.hpp"

namespace vaskit {

/// A . x = rhs with x ranging over naturals shifted by per-variable lower
/// bounds (default 0).
struct LinearSystem {
    IntMat a;
    IntVec rhs;
    IntVec lower; // empty means all-zero

    LinearSystem() = default;
    LinearSystem(IntMat m, IntVec b) : a(std::move(m)), rhs(std::move(b)) {}

    int vars() const { return a.cols; }
    /// Plain-text min/eq dump for bug reports.
    std::string dump() const;
};

struct HilbertBasis {
    std::vector<IntVec> generators; // pairwise incomparable, lex-sorted
};

/// Minimal nonzero N-solutions of A.x = 0 (Contejean-Devie completion).
HilbertBasis hilbert_basis(const IntMat& a, const Limits& lim = {});

/// Full description of the N-solution set: sol = minimal + N(periods).
/// `feasible` is false iff minimal is empty.
struct SolutionSet {
    std::vector<IntVec> minimal;
    std::vector<IntVec> periods;
    bool feasible = false;
};

SolutionSet solve_system(const LinearSystem& sys, const Limits& lim = {});

/// <=-minimal N-solutions; empty iff infeasible.
std::vector<IntVec> minimal_solutions(const LinearSystem& sys, const Limits& lim = {});

bool is_feasible(const LinearSystem& sys, const Limits& lim = {});

/// True iff `var` takes arbitrarily large values over N-solutions. Decided by
/// an exact rational LP on the homogeneous system. Reports a precondition
/// violation if sys is infeasible.
bool is_unbounded(const LinearSystem& sys, int var, const Limits& lim = {});

/// Exact set of value tuples the (all bounded) variables take over the
/// N-solutions.
std::vector<IntVec> bounded_values(const LinearSystem& sys, const std::vector<int>& vars,
                                   const Limits& lim = {});

/// Is v an N-combination of gens? Exact for small values; returns false
/// beyond an internal search budget (callers use it only to drop redundant
/// generators, where a conservative answer is safe).
bool monoid_member(const IntVec& v, const std::vector<IntVec>& gens);

/// Drops generators that are N-combinations of the others.
void minimize_generators(std::vector<IntVec>& gens);

/// Is v an integer combination of f? Returns the coefficient witness.
std::optional<IntVec> z_membership(const std::vector<IntVec>& f, const IntVec& v);

/// Is v a nonnegative rational combination of f? Exact simplex feasibility.
bool cone_membership(const std::vector<IntVec>& f, const IntVec& v);

/// Feasibility over Q of { A.x = b, x >= 0 } (phase-1 simplex, exact pivots).
bool rational_feasible(const IntMat& a, const IntVec& rhs);

/// Feasibility over Q of { A.x = 0, x >= 0, x[var] >= 1 }.
bool rational_feasible_positive(const IntMat& a, int var);

/// Smith normal form u * m * v = diag(d_1..d_r, 0, ..).
struct SmithForm {
    IntMat u; // rows x rows, unimodular
    IntMat v; // cols x cols, unimodular
    std::vector<Int> diag;
    int rank = 0;
};

SmithForm smith_form(const IntMat& m);

} // namespace vaskit
