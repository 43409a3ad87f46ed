// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vaskit {

/// A configured resource cap was exceeded. Never converted into a yes/no
/// answer; surfaces as a distinct "resource" verdict (CLI exit code 2).
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// An internal invariant failed (rank not decreasing, cleaning fixpoint
/// cycle, ...). CLI exit code 3.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

/// Malformed input: parse errors, arity mismatches, precondition violations.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Resource caps. Defaults can be overridden by VASKIT_* environment
/// variables (see limits_from_env).
struct Limits {
    std::int64_t cd_frontier = 4'000'000;      // completion frontier nodes
    std::int64_t linearize_paths = 10'000;     // line machines per linearize
    std::int64_t workset = 50'000;             // engine workset size
    std::int64_t clean_iterations = 400;       // cleaning rounds per machine
    std::int64_t oracle_states = 100'000;      // oracle configurations
    std::int64_t witness_states = 4'000'000;   // witness search configurations
    std::int64_t witness_cap = 512;            // witness search counter cap
    std::int64_t monoid_pieces = 20'000;       // monoid decomposition pieces
    std::int64_t dnf_disjuncts = 100'000;      // constraint-form disjuncts
    std::int64_t product_states = 20'000;      // P1/P2 product states
    std::int64_t threshold_scan = 100'000;     // asymptotic threshold line scan
    std::int64_t engine_depth = 16;            // nested engine recursion
};

Limits limits_from_env();

} // namespace vaskit
