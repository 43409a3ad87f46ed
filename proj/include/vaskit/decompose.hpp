// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vaskit/charsys.hpp"

namespace vaskit {

/// A perfect machine together with the projection of its characteristic
/// system's solutions to the outer source/target variables.
struct PerfectComponent {
    Machine machine;
    HybridLinearSet over; // over N^{arity(qin) + arity(qfin)}
    std::string provenance;
};

struct EngineStats {
    std::int64_t workset_peak = 0;
    std::int64_t iterations = 0;
    std::int64_t components = 0;
    std::vector<std::string> ranks; // provenance -> rank trace lines
};

/// Algorithm 1: the perfect-decomposition worklist. Components' restricted
/// relations union to Rel(m, qin, qfin).
std::vector<PerfectComponent> approximate_machine(const Machine& m, const Limits& lim = {},
                                                  EngineStats* stats = nullptr);

/// Cleaning only (C1, C2, W1, W3, W2); rank never increases.
std::vector<Machine> engine_clean(const Machine& m, const Limits& lim = {});

struct PerfectVerdict {
    enum class Kind { Perfect, W1, W3, W2, P1, P2 };
    Kind kind = Kind::Perfect;
    int scc = -1;
    int var = -1;     // offending CharSys variable (W1/W3/P1)
    int counter = -1; // local coordinate (W2/P2)
    bool backward = false;
    Int bound = 0; // P2
};

/// Checks W1, W3, W2, P1, P2 in order on a cleaned machine.
PerfectVerdict engine_is_perfect(const Machine& m, const Limits& lim = {});

struct CoverOutcome {
    bool coverable = true;
    int counter = -1;
    Int bound = 0;
};

/// Backwards coverability on a strongly connected machine (entry state =
/// machine.qin): can (entry, entry + 1) be realized as a cycle pair for some
/// strictly positive pump? On failure reports a sound per-counter bound.
CoverOutcome backwards_cover(const Machine& scc_machine, const IntVec& entry,
                             const Limits& lim = {});

} // namespace vaskit
