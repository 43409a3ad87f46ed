// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "vaskit/diophantine.hpp"
#include "vaskit/numeric.hpp"

namespace vaskit {

/// base + N(periods), a subset of N^n.
struct LinearSet {
    IntVec base;
    std::vector<IntVec> periods;

    int ambient() const { return static_cast<int>(base.size()); }
};

/// bases + N(periods) with a nonempty base set.
struct HybridLinearSet {
    std::vector<IntVec> bases;
    std::vector<IntVec> periods;

    int ambient() const { return static_cast<int>(bases.at(0).size()); }
};

/// Finite union of hybridlinear sets; no components = the empty set.
struct SemilinearSet {
    int ambient = 0;
    std::vector<HybridLinearSet> components;

    bool empty() const { return components.empty(); }
};

/// Q>=0(cone_generators) ∩ Z(grid_generators); the value of the pumps
/// operator on directed hybridlinear sets.
struct ConeGrid {
    std::vector<IntVec> cone_generators;
    std::vector<IntVec> grid_generators;
};

void canonicalize(HybridLinearSet& h);
void canonicalize(SemilinearSet& s);

HybridLinearSet hybrid(std::vector<IntVec> bases, std::vector<IntVec> periods);
SemilinearSet semilinear_empty(int ambient);
SemilinearSet semilinear_full(int ambient);
SemilinearSet semilinear_point(const IntVec& p);
SemilinearSet from_hybrid(HybridLinearSet h);
SemilinearSet from_linear(const LinearSet& l);
LinearSet linear(IntVec base, std::vector<IntVec> periods);

bool member(const LinearSet& l, const IntVec& x);
bool member(const HybridLinearSet& h, const IntVec& x);
bool member(const SemilinearSet& s, const IntVec& x);

int dimension(const HybridLinearSet& h);
/// nullopt is the distinguished marker for the empty set.
std::optional<int> dimension(const SemilinearSet& s);

/// Exact intersection; nullopt when empty.
std::optional<HybridLinearSet> intersect(const HybridLinearSet& h1, const HybridLinearSet& h2);
SemilinearSet intersect(const SemilinearSet& s1, const SemilinearSet& s2);
SemilinearSet unite(SemilinearSet s1, const SemilinearSet& s2);

/// dim(A ∩ B) = dim(A) = dim(B) with a nonempty intersection.
bool is_nondegenerate(const HybridLinearSet& a, const HybridLinearSet& b);

/// Partitions the bases into groups with pairwise differences in Z(periods).
std::vector<HybridLinearSet> make_directed(const HybridLinearSet& h);
bool is_directed(const HybridLinearSet& h);

/// Pumps of a directed hybridlinear set: Q>=0(F) ∩ Z(F).
ConeGrid pumps_directed(const HybridLinearSet& l);
bool member(const ConeGrid& cg, const IntVec& v);

/// Is w in the interior of N(f): for every generator f_i some multiple of w
/// dominates it inside N(f).
bool interior_member(const IntVec& w, const std::vector<IntVec>& f);

/// Exact L \ (p + L); requires p in N(periods). The dimension strictly drops.
SemilinearSet subtract_shift(const HybridLinearSet& l, const IntVec& p, const Limits& lim = {});

/// Disjoint linear sets with linearly independent period sets covering s.
std::vector<LinearSet> unambiguous_decomposition(const SemilinearSet& s, const Limits& lim = {});

SemilinearSet shift(SemilinearSet s, const IntVec& v);
/// Coordinate deletion: keeps exactly the listed coordinates, in order.
SemilinearSet project(const SemilinearSet& s, const std::vector<int>& keep);
/// Preimage of a coordinate deletion: deleted coordinates become free.
SemilinearSet unproject(const SemilinearSet& s, const std::vector<int>& keep, int ambient);
/// Relation reversal: (x, y) -> (y, x) for s over N^{n1+n2}.
SemilinearSet swap_halves(const SemilinearSet& s, int n1, int n2);

// --- Constraint form -------------------------------------------------------

struct IneqAtom {
    IntVec a;
    Int c; // a.x >= c
};

struct ModAtom {
    IntVec a;
    Int m; // modulus >= 1
    Int r; // canonical residue, 0 <= r < m
};

struct Conjunction {
    std::vector<IneqAtom> ineqs;
    std::vector<ModAtom> mods;
};

/// DNF over inequality and congruence atoms, denoting a subset of N^n.
/// No disjuncts = the empty set.
struct ConstraintForm {
    int ambient = 0;
    std::vector<Conjunction> disjuncts;
};

bool member(const ConstraintForm& c, const IntVec& x);
ConstraintForm cf_true(int ambient);
ConstraintForm cf_false(int ambient);
ConstraintForm cf_complement(const ConstraintForm& c, const Limits& lim = {});
ConstraintForm cf_union(ConstraintForm a, const ConstraintForm& b);
ConstraintForm cf_intersection(const ConstraintForm& a, const ConstraintForm& b,
                               const Limits& lim = {});

/// Exact conversion via slack compilation and minimal solutions.
SemilinearSet to_generators(const ConstraintForm& c, const Limits& lim = {});
/// Exact conversion via monoid decomposition, cone duals and Smith form.
ConstraintForm to_constraints(const SemilinearSet& s, const Limits& lim = {});

/// N(f) as a finite union of (offset + N(g)) with g linearly independent.
std::vector<std::pair<IntVec, std::vector<IntVec>>> decompose_monoid(
    const std::vector<IntVec>& f, int ambient, const Limits& lim = {});

} // namespace vaskit
