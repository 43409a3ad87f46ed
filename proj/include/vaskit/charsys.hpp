// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>

#include "vaskit/machine.hpp"

namespace vaskit {

/// Which CharSys variable is which.
struct VarInfo {
    enum class Kind { Src, Tgt, EdgeCount, SccPeriod, BridgePeriod };
    Kind kind = Kind::Src;
    int scc = -1;    // Src/Tgt
    int coord = -1;  // Src/Tgt coordinate
    int edge = -1;   // EdgeCount / periods
    int period = -1; // period index within the edge's overapproximation
};

/// The integer linear program combining Euler-Kirchhoff flow equations,
/// effect equations with period slack, and bridge membership constraints.
struct CharSystem {
    LinearSystem sys;
    std::vector<VarInfo> vars;
    SccInfo scc;
    std::vector<int> src_start, tgt_start;                // per SCC
    std::map<int, int> edge_var;                          // edge index -> var
    std::map<std::pair<int, int>, int> period_var;        // (edge, period) -> var
    std::vector<int> entry_state, exit_state;             // per SCC
    int n_sccs = 0;
};

/// Requires a line machine whose edges all carry a single basic directed
/// linear overapproximation.
CharSystem build_charsys(const Machine& m);

struct SolvedCharSystem {
    bool feasible = false;
    std::vector<IntVec> minimal;
    std::vector<IntVec> hilbert;
    std::vector<bool> unbounded;
};

SolvedCharSystem solve_charsys(const CharSystem& cs, const Limits& lim = {});

/// Coordinate projection of minimal solutions (bases) and hilbert
/// generators (periods).
HybridLinearSet project_solutions(const SolvedCharSystem& s, const std::vector<int>& vars);

/// Exact flow-conservation equalities for one SCC, over its intra edges in
/// scc.edges[comp] order. Homogeneous variant on demand.
LinearSystem ek_constraints(const Machine& m, const SccInfo& scc, int comp, int entry, int exit,
                            bool homogeneous);

/// Hierholzer-style reconstruction: a concrete entry->exit path whose edge
/// multiset equals w (indexed like scc.edges[comp]); requires w to satisfy
/// the flow equations with w[e] >= 1 everywhere.
std::vector<int> path_from_parikh(const Machine& m, const SccInfo& scc, int comp,
                                  const std::vector<Int>& w, int entry, int exit);

/// Exact linear overapproximation of counter add/delete bridges.
LinearSet counter_bridge_over(const Machine& m, int edge_idx);

} // namespace vaskit
