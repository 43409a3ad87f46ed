// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vaskit/relations.hpp"

namespace vaskit {

struct EdgeLabel {
    enum class Kind { Relation, AddCounters, DeleteCounters };
    Kind kind = Kind::Relation;
    RelationLabel rel;
    std::vector<int> counters; // AddCounters / DeleteCounters

    static EdgeLabel relation(RelationLabel r) {
        EdgeLabel l;
        l.kind = Kind::Relation;
        l.rel = std::move(r);
        return l;
    }
    static EdgeLabel add_counters(std::vector<int> c) {
        EdgeLabel l;
        l.kind = Kind::AddCounters;
        l.counters = std::move(c);
        return l;
    }
    static EdgeLabel delete_counters(std::vector<int> c) {
        EdgeLabel l;
        l.kind = Kind::DeleteCounters;
        l.counters = std::move(c);
        return l;
    }
};

struct Edge {
    int src = 0, tgt = 0;
    EdgeLabel label;
    /// Basic directed linear asymptotic overapproximation (engine state).
    std::optional<LinearSet> over;
};

/// Monotone R-extended VASS: SCC-structured multigraph with per-state
/// (SCC-consistent) active counter sets.
struct Machine {
    std::string name;
    int counters = 0;
    std::vector<std::string> state_names;
    std::vector<std::vector<int>> active; // sorted global counter ids per state
    std::vector<Edge> edges;
    int qin = 0, qfin = 0;

    int n_states() const { return static_cast<int>(state_names.size()); }
    int arity(int state) const { return static_cast<int>(active[state].size()); }
};

struct SccInfo {
    std::vector<int> comp;            // state -> component id, topological order
    int n_comps = 0;
    std::vector<std::vector<int>> states;   // per component
    std::vector<std::vector<int>> edges;    // intra-component edge indices
    std::vector<bool> trivial;              // no intra edges
    std::vector<int> bridge_edges;          // edge indices leaving a component
};

SccInfo scc_info(const Machine& m);

/// Structural diagnostics; empty iff the machine is well-formed.
std::vector<std::string> validate(const Machine& m);

struct Configuration {
    int state = 0;
    IntVec val;
};

/// Step semantics; Section labels are checked with a bounded inner oracle
/// (sound for yes; `budget` caps explored configurations).
bool oracle_step(const Machine& m, const Configuration& c, int edge_idx, const IntVec& y,
                 const Int& cap, std::int64_t budget = 200'000);

struct Run {
    std::vector<Configuration> configs;
    std::vector<int> edges;
};

enum class OracleStatus { Found, NotFound, Resource };

struct OracleResult {
    OracleStatus status = OracleStatus::NotFound;
    std::optional<Run> run;
    std::int64_t explored = 0;
};

/// Breadth-first exploration with all counters <= cap. "NotFound" is
/// explicitly inconclusive for unreachability.
OracleResult brute_force_reach(const Machine& m, const Configuration& src,
                               const Configuration& tgt, const Int& cap, std::int64_t max_states);

/// All configurations (state, val <= cap) reachable from src.
std::vector<Configuration> oracle_reach_set(const Machine& m, const Configuration& src,
                                            const Int& cap, std::int64_t max_states);

bool validate_run(const Machine& m, const Run& run, const Configuration& src,
                  const Configuration& tgt, const Int& cap);

/// Splits the machine into line machines (SCC condensation a path with a
/// unique bridge per gap); the union of reachability relations is preserved.
std::vector<Machine> linearize(const Machine& m, const Limits& lim = {});

Machine reverse_machine(const Machine& m);

/// Reindexes counters into a larger space and makes `extra_active` counters
/// active (and invariant) in every state.
Machine reindex_machine(const Machine& m, int new_total, const std::vector<int>& counter_map,
                        const std::vector<int>& extra_active);

/// Is this a VASSnz (Add and NZT labels only, all counters active)?
bool is_vassnz(const Machine& m);
/// Priorities (distinct tested prefix lengths) of a VASSnz.
std::vector<int> vassnz_priorities(const Machine& m);

/// The five-block conversion of a VASSnz into a monotone eVASS whose labels
/// are sections of the machine with the top priority removed.
Machine vassnz_to_mevass(const Machine& m);

/// Rewrites the constraint into weak-zero-test form via the transfer gadget;
/// sections whose constraint already is a WZT are returned unchanged.
SectionLabel normalize_section(const SectionLabel& sec, const Limits& lim = {});

/// Recognizes the canonical WZT generator form over N^{a+b}.
std::optional<std::pair<std::vector<int>, std::vector<int>>> as_wzt(const SemilinearSet& s,
                                                                    int a, int b);
/// The canonical WZT generator form.
SemilinearSet wzt_set(const std::vector<int>& src_zero, const std::vector<int>& tgt_zero, int a,
                      int b);

/// Turns a WZT-or-unconstrained section into a plain machine plus the
/// surviving projection (zero tests become delete/re-add counter bridges).
std::pair<Machine, std::vector<int>> wrap_section(const SectionLabel& sec, const Limits& lim = {});

/// Basis of the span of cycle effects (circulations over base effects plus
/// period effects); requires approximated labels.
std::vector<IntVec> effect_space(const Machine& m, const SccInfo& scc, int comp);

struct Rank {
    IntVec v; // index d = number of states in SCCs of effect dimension d
};

bool rank_less(const Rank& a, const Rank& b);
bool rank_less_eq(const Rank& a, const Rank& b);
/// Rank over N^{d+1}; d = the given dimension bound (most significant last).
Rank rank_of(const Machine& m, int dim_bound);

std::string machine_key(const Machine& m);

} // namespace vaskit
