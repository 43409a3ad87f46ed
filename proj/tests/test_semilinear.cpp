// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <deque>
#include <set>

#include "test_util.hpp"
#include "vaskit/semilinear.hpp"

using namespace vaskit;
using namespace vaskit::test;

namespace {

/// All points of bases + N(periods) inside [0,cap]^n, by saturation.
std::vector<IntVec> expand_box(const std::vector<IntVec>& bases, const std::vector<IntVec>& periods,
                               int cap) {
    std::set<IntVec, bool (*)(const IntVec&, const IntVec&)> seen(lex_less);
    std::deque<IntVec> todo;
    auto inside = [&](const IntVec& v) {
        for (const Int& x : v)
            if (x > cap) return false;
        return true;
    };
    for (const IntVec& b : bases)
        if (inside(b) && seen.insert(b).second) todo.push_back(b);
    while (!todo.empty()) {
        IntVec v = todo.front();
        todo.pop_front();
        for (const IntVec& p : periods) {
            IntVec w = add(v, p);
            if (inside(w) && seen.insert(w).second) todo.push_back(w);
        }
    }
    return {seen.begin(), seen.end()};
}

std::vector<IntVec> expand_box(const SemilinearSet& s, int cap) {
    std::set<IntVec, bool (*)(const IntVec&, const IntVec&)> all(lex_less);
    for (const HybridLinearSet& h : s.components)
        for (IntVec& v : expand_box(h.bases, h.periods, cap)) all.insert(std::move(v));
    return {all.begin(), all.end()};
}

HybridLinearSet rnd_hybrid(Rng& rng, int n, int max_bases, int max_periods, int hi) {
    std::vector<IntVec> bases, periods;
    int nb = rnd_int(rng, 1, max_bases);
    int np = rnd_int(rng, 0, max_periods);
    for (int i = 0; i < nb; ++i) bases.push_back(rnd_vec(rng, n, 0, hi));
    for (int i = 0; i < np; ++i) {
        IntVec p = rnd_vec(rng, n, 0, hi);
        if (!is_zero(p)) periods.push_back(p);
    }
    return hybrid(std::move(bases), std::move(periods));
}

} // namespace

TEST_CASE("membership in generator representations") {
    SemilinearSet n2 = semilinear_full(2);
    CHECK(member(n2, {3, 4}));
    SemilinearSet evens_all = from_hybrid(hybrid({{0}, {1}}, {{2}}));
    CHECK(member(evens_all, {5}));
    HybridLinearSet l = hybrid({{1, 1}}, {{1, 2}});
    CHECK(!member(l, {2, 2}));
    CHECK(member(l, {2, 3}));
    CHECK_THROWS_AS((void)member(n2, IntVec{1}), InputError);
}

TEST_CASE("dimension") {
    CHECK(dimension(semilinear_full(2)) == 2);
    CHECK(dimension(from_hybrid(hybrid({{0, 0}}, {{1, 1}}))) == 1);
    CHECK(dimension(from_hybrid(hybrid({{0, 0}}, {{0, 1}, {1, 1}}))) == 2);
    CHECK(!dimension(semilinear_empty(2)).has_value());
}

TEST_CASE("intersection of the half-plane figures") {
    // {0 <= y <= 2x} and {1 <= y <= 1+x}
    HybridLinearSet l1 = hybrid({{0, 0}}, {{1, 0}, {1, 1}, {1, 2}});
    HybridLinearSet l2 = hybrid({{0, 1}}, {{1, 0}, {1, 1}});
    auto i = intersect(l1, l2);
    REQUIRE(i.has_value());
    CHECK(i->bases == std::vector<IntVec>{{1, 1}, {1, 2}});
    CHECK(i->periods == std::vector<IntVec>{{1, 0}, {1, 1}});
    // membership cross-check on a box
    for_box(2, 8, [&](const IntVec& x) {
        CHECK(member(*i, x) == (member(l1, x) && member(l2, x)));
    });
}

TEST_CASE("degenerate diagonal intersection") {
    HybridLinearSet upper = hybrid({{0, 0}}, {{0, 1}, {1, 1}}); // y >= x
    HybridLinearSet lower = hybrid({{0, 0}}, {{1, 0}, {1, 1}}); // y <= x
    auto diag = intersect(upper, lower);
    REQUIRE(diag.has_value());
    CHECK(diag->bases == std::vector<IntVec>{{0, 0}});
    CHECK(diag->periods == std::vector<IntVec>{{1, 1}});
    CHECK(!is_nondegenerate(upper, lower));
    HybridLinearSet l1 = hybrid({{0, 0}}, {{1, 0}, {1, 1}, {1, 2}});
    HybridLinearSet l2 = hybrid({{0, 1}}, {{1, 0}, {1, 1}});
    CHECK(is_nondegenerate(l1, l2));
    CHECK(!is_nondegenerate(hybrid({{0, 0}}, {{1, 0}, {0, 1}}), hybrid({{0, 0}}, {{1, 0}})));
    CHECK_THROWS_AS((void)is_nondegenerate(hybrid({{0, 0}}, {}), hybrid({{0}}, {})), InputError);
}

TEST_CASE("idempotent intersection by sampling") {
    Rng rng(555);
    for (int iter = 0; iter < 10; ++iter) {
        HybridLinearSet h = rnd_hybrid(rng, 2, 2, 3, 3);
        auto i = intersect(h, h);
        REQUIRE(i.has_value());
        for_box(2, 7, [&](const IntVec& x) { CHECK(member(*i, x) == member(h, x)); });
    }
}

TEST_CASE("constraint form complement basics") {
    ConstraintForm ge1{1, {Conjunction{{{IntVec{1}, Int(1)}}, {}}}};
    ConstraintForm c = cf_complement(ge1);
    CHECK(member(c, {0}));
    CHECK(!member(c, {1}));
    CHECK(!member(c, {5}));

    ConstraintForm even{1, {Conjunction{{}, {{IntVec{1}, Int(2), Int(0)}}}}};
    ConstraintForm odd = cf_complement(even);
    CHECK(member(odd, {1}));
    CHECK(member(odd, {3}));
    CHECK(!member(odd, {2}));
}

TEST_CASE("complement is an involution on samples") {
    Rng rng(808);
    for (int iter = 0; iter < 10; ++iter) {
        int n = rnd_int(rng, 1, 2);
        ConstraintForm c{n, {}};
        int nd = rnd_int(rng, 1, 2);
        for (int d = 0; d < nd; ++d) {
            Conjunction conj;
            int ni = rnd_int(rng, 0, 2);
            for (int k = 0; k < ni; ++k) conj.ineqs.push_back({rnd_vec(rng, n, -2, 2), Int(rnd_int(rng, -2, 2))});
            if (rnd_int(rng, 0, 1)) conj.mods.push_back({rnd_vec(rng, n, 0, 2), Int(rnd_int(rng, 2, 3)), Int(rnd_int(rng, 0, 1))});
            c.disjuncts.push_back(std::move(conj));
        }
        ConstraintForm cc = cf_complement(cf_complement(c));
        for_box(n, 8, [&](const IntVec& x) { CHECK(member(cc, x) == member(c, x)); });
    }
}

TEST_CASE("to_generators of a single inequality") {
    ConstraintForm c{2, {Conjunction{{{IntVec{1, -1}, Int(0)}}, {}}}};
    SemilinearSet s = to_generators(c);
    REQUIRE(s.components.size() == 1);
    CHECK(s.components[0].bases == std::vector<IntVec>{{0, 0}});
    CHECK(s.components[0].periods == std::vector<IntVec>{{1, 0}, {1, 1}});
    for_box(2, 8, [&](const IntVec& x) { CHECK(member(s, x) == (x[0] >= x[1])); });
}

TEST_CASE("to_constraints of a shifted line") {
    SemilinearSet s = from_hybrid(hybrid({{1, 1}}, {{1, 2}}));
    ConstraintForm c = to_constraints(s);
    for_box(2, 12, [&](const IntVec& x) { CHECK(member(c, x) == member(s, x)); });
}

TEST_CASE("generator/constraint round trips on random sets") {
    Rng rng(909);
    for (int iter = 0; iter < 8; ++iter) {
        int n = rnd_int(rng, 1, 2);
        SemilinearSet s = semilinear_empty(n);
        int nc = rnd_int(rng, 1, 2);
        for (int k = 0; k < nc; ++k) s.components.push_back(rnd_hybrid(rng, n, 2, 2, 3));
        canonicalize(s);
        SemilinearSet back = to_generators(to_constraints(s));
        for_box(n, 8, [&](const IntVec& x) { CHECK(member(back, x) == member(s, x)); });
    }
}

TEST_CASE("empty set round trip") {
    CHECK(to_generators(cf_false(2)).empty());
    CHECK(to_constraints(semilinear_empty(2)).disjuncts.empty());
}

TEST_CASE("subtract_shift drops dimension") {
    SUBCASE("quadrant minus shifted quadrant") {
        HybridLinearSet n2 = hybrid({{0, 0}}, {{1, 0}, {0, 1}});
        SemilinearSet d = subtract_shift(n2, {3, 4});
        auto dim_d = dimension(d);
        REQUIRE(dim_d.has_value());
        CHECK(*dim_d == 1);
        for_box(2, 10, [&](const IntVec& x) {
            bool expect = !(x[0] >= 3 && x[1] >= 4);
            CHECK(member(d, x) == expect);
        });
    }
    SUBCASE("line minus shift") {
        HybridLinearSet line = hybrid({{0}}, {{1}});
        SemilinearSet d = subtract_shift(line, {2});
        for_box(1, 9, [&](const IntVec& x) { CHECK(member(d, x) == (x[0] <= 1)); });
    }
    SUBCASE("diagonal minus shift") {
        HybridLinearSet diag = hybrid({{0, 0}}, {{1, 1}});
        SemilinearSet d = subtract_shift(diag, {1, 1});
        for_box(2, 6, [&](const IntVec& x) { CHECK(member(d, x) == (x == IntVec{0, 0})); });
    }
    SUBCASE("shift must lie in the period monoid") {
        CHECK_THROWS_AS((void)subtract_shift(hybrid({{0, 0}}, {{1, 1}}), {1, 0}), InputError);
    }
}

TEST_CASE("subtract_shift on random sets keeps exactness") {
    Rng rng(616);
    int done = 0;
    while (done < 12) {
        int n = rnd_int(rng, 1, 3);
        HybridLinearSet h = rnd_hybrid(rng, n, 2, 3, 2);
        if (h.periods.empty()) continue;
        // random p in N(periods)
        IntVec p = zero_vec(n);
        for (const IntVec& q : h.periods) p = add(p, scale(rnd_int(rng, 0, 2), q));
        if (is_zero(p)) continue;
        ++done;
        SemilinearSet d = subtract_shift(h, p);
        auto dd = dimension(d);
        if (dd) CHECK(*dd < dimension(h));
        SemilinearSet shifted = shift(from_hybrid(h), p);
        for_box(n, 6, [&](const IntVec& x) {
            CHECK(member(d, x) == (member(h, x) && !member(shifted, x)));
        });
    }
}

TEST_CASE("interior membership") {
    std::vector<IntVec> units = {{1, 0}, {0, 1}};
    CHECK(interior_member({1, 1}, units));
    CHECK(!interior_member({1, 0}, units));
    std::vector<IntVec> holes = {{1, 0}, {1, 2}, {1, 3}};
    CHECK(interior_member({1, 1}, holes)); // interior despite (1,1) not in N(F)
}

TEST_CASE("make_directed splits bases by lattice reachability") {
    HybridLinearSet two_lines = hybrid({{0}, {1}}, {{2}});
    auto groups = make_directed(two_lines);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].bases == std::vector<IntVec>{{0}});
    CHECK(groups[1].bases == std::vector<IntVec>{{1}});

    HybridLinearSet joined = hybrid({{1, 1}, {1, 2}}, {{1, 0}, {1, 1}});
    CHECK(make_directed(joined).size() == 1);
    CHECK(is_directed(joined));

    HybridLinearSet single = hybrid({{3, 4}}, {{1, 0}});
    auto same = make_directed(single);
    REQUIRE(same.size() == 1);
    CHECK(same[0].bases == single.bases);
}

TEST_CASE("pumps of directed sets") {
    ConeGrid full = pumps_directed(hybrid({{0, 0}}, {{1, 0}, {0, 1}}));
    CHECK(member(full, {3, 4}));
    ConeGrid evens = pumps_directed(hybrid({{0}}, {{2}}));
    CHECK(member(evens, {4}));
    CHECK(!member(evens, {3}));
    ConeGrid holes = pumps_directed(hybrid({{0, 0}}, {{1, 0}, {1, 2}, {1, 3}}));
    CHECK(member(holes, {1, 1})); // the hole is filled
    CHECK(!member(holes, {1, 4}));
    CHECK_THROWS_AS((void)pumps_directed(hybrid({{0}, {1}}, {{2}})), InputError);
}

TEST_CASE("unambiguous decomposition") {
    auto d1 = unambiguous_decomposition(semilinear_full(1));
    REQUIRE(d1.size() == 1);
    CHECK(d1[0].base == IntVec{0});
    CHECK(d1[0].periods == std::vector<IntVec>{{1}});

    auto d2 = unambiguous_decomposition(from_hybrid(hybrid({{0}, {1}}, {{2}})));
    REQUIRE(d2.size() == 2);
    CHECK(d2[0].base == IntVec{0});
    CHECK(d2[1].base == IntVec{1});

    auto d3 = unambiguous_decomposition(semilinear_full(2));
    REQUIRE(d3.size() == 1);
    CHECK(rational_rank(d3[0].periods) == static_cast<int>(d3[0].periods.size()));
}

TEST_CASE("unambiguous decomposition on random sets: disjoint, independent, covering") {
    Rng rng(2024);
    for (int iter = 0; iter < 8; ++iter) {
        int n = rnd_int(rng, 1, 2);
        SemilinearSet s = from_hybrid(rnd_hybrid(rng, n, 2, 3, 2));
        auto pieces = unambiguous_decomposition(s);
        for (const LinearSet& l : pieces)
            CHECK(rational_rank(l.periods) == static_cast<int>(l.periods.size()));
        for_box(n, 7, [&](const IntVec& x) {
            int count = 0;
            for (const LinearSet& l : pieces)
                if (member(l, x)) ++count;
            CHECK(count == (member(s, x) ? 1 : 0));
        });
    }
}

TEST_CASE("membership agrees with box expansion on random sets") {
    Rng rng(112233);
    for (int iter = 0; iter < 10; ++iter) {
        int n = rnd_int(rng, 1, 3);
        SemilinearSet s = from_hybrid(rnd_hybrid(rng, n, 2, 3, 3));
        auto pts = expand_box(s, 10);
        std::set<IntVec, bool (*)(const IntVec&, const IntVec&)> in_set(lex_less);
        for (auto& p : pts) in_set.insert(p);
        // expansion within the box is complete for points whose witnesses stay
        // in the box only when periods are nonnegative, which holds here
        for_box(n, 10, [&](const IntVec& x) { CHECK(member(s, x) == (in_set.count(x) > 0)); });
    }
}

TEST_CASE("projection preserves membership") {
    Rng rng(321);
    for (int iter = 0; iter < 10; ++iter) {
        SemilinearSet s = from_hybrid(rnd_hybrid(rng, 3, 2, 3, 3));
        std::vector<int> keep = {0, 2};
        SemilinearSet p = project(s, keep);
        for_box(3, 6, [&](const IntVec& x) {
            if (member(s, x)) CHECK(member(p, IntVec{x[0], x[2]}));
        });
    }
}

TEST_CASE("unproject is the exact preimage") {
    SemilinearSet diag = from_hybrid(hybrid({{0}}, {{2}}));
    SemilinearSet up = unproject(diag, {1}, 3);
    for_box(3, 6, [&](const IntVec& x) {
        CHECK(member(up, x) == (x[1] % 2 == 0));
    });
}

TEST_CASE("nondegenerate intersection of directed sets is directed") {
    Rng rng(16);
    int done = 0;
    while (done < 30) {
        int n = rnd_int(rng, 2, 3);
        HybridLinearSet a = rnd_hybrid(rng, n, 2, 3, 2);
        HybridLinearSet b = rnd_hybrid(rng, n, 2, 3, 2);
        if (!is_directed(a) || !is_directed(b)) continue;
        if (!is_nondegenerate(a, b)) continue;
        ++done;
        auto i = intersect(a, b);
        REQUIRE(i.has_value());
        CHECK(is_directed(*i));
        for_box(n, 5, [&](const IntVec& x) {
            CHECK(member(*i, x) == (member(a, x) && member(b, x)));
        });
    }
}
