// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vaskit/semilinear.hpp"

namespace vaskit {

struct Machine;

/// X = project(Rel(machine, qin, qfin) ∩ constraint): the closure-friendly
/// wrapper for reachability relations.
struct SectionLabel {
    std::shared_ptr<const Machine> machine;
    std::string machine_name; // document reference, may be empty for derived machines
    int qin = 0;
    int qfin = 0;
    /// Over N^{a+b} where a/b are the active-counter counts at qin/qfin.
    std::optional<SemilinearSet> constraint;
    /// Sorted indices into the (a+b)-vector that survive the projection.
    std::vector<int> keep;
    /// Asserted by constructions that guarantee monotonicity structurally
    /// (e.g. the VASSnz conversion); the validator trusts it.
    bool monotone_hint = false;
};

struct RelationLabel {
    enum class Kind { Add, Semilinear, Nzt, Wzt, Section };
    Kind kind = Kind::Add;

    IntVec delta; // Add

    int sl_in = 0, sl_out = 0; // Semilinear arity
    SemilinearSet rel;         // Semilinear relation over N^{sl_in+sl_out}

    int arity_n = 0;               // Nzt / Wzt ambient
    int nzt_j = 0;                 // coords [0, nzt_j) tested for zero
    std::vector<int> wzt_src, wzt_tgt;

    std::shared_ptr<SectionLabel> section;

    int n_in() const;
    int n_out() const;

    static RelationLabel add(IntVec d);
    static RelationLabel semilinear(int n_in, int n_out, SemilinearSet s);
    static RelationLabel nzt(int j, int n);
    static RelationLabel wzt(std::vector<int> src_zero, std::vector<int> tgt_zero, int n);
    static RelationLabel make_section(SectionLabel s);
};

/// Exact membership. Section labels decide via the decomposition engine.
bool contains(const RelationLabel& r, const IntVec& x, const IntVec& y);

/// Structural for Add/Nzt/Wzt and the Section hint; decided exactly for
/// Semilinear via complement-intersect emptiness.
bool is_monotone(const RelationLabel& r);

/// Exact generator form for Add/Semilinear/Nzt/Wzt; nullopt for Section.
std::optional<SemilinearSet> as_semilinear(const RelationLabel& r);

/// A label denoting r ∩ s. Non-section kinds collapse to Semilinear;
/// Section conjoins the constraint.
RelationLabel intersect_semilinear(const RelationLabel& r, const SemilinearSet& s);

/// Relation with one restricted part and its basic directed linear
/// asymptotic overapproximation.
struct ApproxComponent {
    RelationLabel restricted;
    LinearSet over;
};

/// Splits r into finitely many parts, each with a basic directed linear
/// asymptotic overapproximation; monotone inputs yield monotone main parts.
std::vector<ApproxComponent> approximate(const RelationLabel& r, const Limits& lim = {});

/// Least N with x + m.w in r for all m >= N (exact for generator kinds;
/// confirmed-run lower bound for Section, every positive probe is genuine).
Int asymptotic_threshold(const RelationLabel& r, const LinearSet& over, const IntVec& x,
                         const IntVec& w, const Limits& lim = {});

/// The reversed relation (pairs swapped).
RelationLabel reverse_label(const RelationLabel& r);

/// Restricts to fixed values on one coordinate of both sides and deletes it.
RelationLabel fix_and_drop(const RelationLabel& r, int coord, const Int& src_val,
                           const Int& tgt_val);

/// Deletes the listed coordinates (both sides) without fixing values.
RelationLabel project_label(const RelationLabel& r, const std::vector<int>& keep_coords);

// Implemented by the engine (decompose.cpp).
std::vector<ApproxComponent> approximate_section(const SectionLabel& sec, const Limits& lim);
bool section_contains(const SectionLabel& sec, const IntVec& x, const IntVec& y);

std::string label_key(const RelationLabel& r);

} // namespace vaskit
