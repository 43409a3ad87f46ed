// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "vaskit/numeric.hpp"

namespace vaskit::test {

using Rng = std::mt19937_64;

inline int rnd_int(Rng& rng, int lo, int hi) {
    return static_cast<int>(rng() % static_cast<unsigned long>(hi - lo + 1)) + lo;
}

inline IntVec rnd_vec(Rng& rng, int n, int lo, int hi) {
    IntVec v(n);
    for (int i = 0; i < n; ++i) v[i] = rnd_int(rng, lo, hi);
    return v;
}

/// Enumerates all vectors in the box [0,cap]^n in lex order, calling f.
template <typename F>
void for_box(int n, int cap, F&& f) {
    IntVec x(n);
    while (true) {
        f(const_cast<const IntVec&>(x));
        int i = n - 1;
        while (i >= 0 && x[i] == cap) {
            x[i] = 0;
            --i;
        }
        if (i < 0) break;
        x[i] += 1;
    }
}

} // namespace vaskit::test
