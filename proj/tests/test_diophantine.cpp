// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>

#include "test_util.hpp"
#include "vaskit/diophantine.hpp"

using namespace vaskit;
using namespace vaskit::test;

namespace {

IntMat mat(std::vector<IntVec> rows) { return IntMat::from_rows(rows); }

LinearSystem sys(std::vector<IntVec> rows, IntVec rhs) {
    return LinearSystem(mat(std::move(rows)), std::move(rhs));
}

std::vector<IntVec> box_solutions(const IntMat& a, const IntVec& rhs, int cap) {
    std::vector<IntVec> out;
    for_box(a.cols, cap, [&](const IntVec& x) {
        if (a.mul(x) == rhs) out.push_back(x);
    });
    return out;
}

std::vector<IntVec> box_minimal(const IntMat& a, const IntVec& rhs, int cap,
                                bool drop_zero) {
    std::vector<IntVec> sols = box_solutions(a, rhs, cap);
    if (drop_zero)
        sols.erase(std::remove_if(sols.begin(), sols.end(), [](const IntVec& v) { return is_zero(v); }),
                   sols.end());
    minimal_elements(sols);
    return sols;
}

} // namespace

TEST_CASE("hilbert basis on one-row systems") {
    CHECK(hilbert_basis(mat({{1, -1}})).generators == std::vector<IntVec>{{1, 1}});
    CHECK(hilbert_basis(mat({{2, -3}})).generators == std::vector<IntVec>{{3, 2}});
    CHECK(hilbert_basis(mat({{1, 1, -1}})).generators ==
          std::vector<IntVec>{{0, 1, 1}, {1, 0, 1}});
}

TEST_CASE("hilbert basis matches brute force on random 2x4 systems") {
    Rng rng(12345);
    for (int iter = 0; iter < 40; ++iter) {
        IntMat a(2, 4);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 4; ++c) a.at(r, c) = rnd_int(rng, -3, 3);
        auto hb = hilbert_basis(a).generators;
        std::vector<IntVec> small;
        for (const IntVec& g : hb) {
            bool fits = true;
            for (const Int& v : g) fits = fits && v <= 12;
            if (fits) small.push_back(g);
        }
        sort_unique(small);
        auto brute = box_minimal(a, zero_vec(2), 12, true);
        CHECK(small == brute);
    }
}

TEST_CASE("hilbert basis generators pairwise incomparable and complete") {
    Rng rng(777);
    for (int iter = 0; iter < 25; ++iter) {
        int n = rnd_int(rng, 2, 4);
        int r = rnd_int(rng, 1, 2);
        IntMat a(r, n);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < n; ++j) a.at(i, j) = rnd_int(rng, -2, 2);
        auto hb = hilbert_basis(a).generators;
        for (std::size_t i = 0; i < hb.size(); ++i)
            for (std::size_t j = 0; j < hb.size(); ++j)
                if (i != j) CHECK(!dominated(hb[i], hb[j]));
        // every brute-force solution with entries <= 8 is an N-combination
        for (const IntVec& s : box_solutions(a, zero_vec(r), 8)) {
            if (is_zero(s)) continue;
            IntMat comb(n, static_cast<int>(hb.size()));
            for (int row = 0; row < n; ++row)
                for (std::size_t k = 0; k < hb.size(); ++k)
                    comb.at(row, static_cast<int>(k)) = hb[k][row];
            CHECK(is_feasible(LinearSystem(comb, s)));
        }
    }
}

TEST_CASE("minimal solutions of small inhomogeneous systems") {
    CHECK(minimal_solutions(sys({{1, 1}}, {2})) ==
          std::vector<IntVec>{{0, 2}, {1, 1}, {2, 0}});
    CHECK(minimal_solutions(sys({{1}}, {3})) == std::vector<IntVec>{{3}});
    SUBCASE("x - 2y = 1 has minimal (1,0) and period (2,1)") {
        auto sol = solve_system(sys({{1, -2}}, {1}));
        CHECK(sol.minimal == std::vector<IntVec>{{1, 0}});
        CHECK(sol.periods == std::vector<IntVec>{{2, 1}});
    }
}

TEST_CASE("solution set reconstructs every brute-force solution") {
    Rng rng(4242);
    for (int iter = 0; iter < 25; ++iter) {
        int n = rnd_int(rng, 2, 4);
        int r = rnd_int(rng, 1, 2);
        IntMat a(r, n);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < n; ++j) a.at(i, j) = rnd_int(rng, -2, 2);
        IntVec rhs = rnd_vec(rng, r, -2, 4);
        auto sol = solve_system(LinearSystem(a, rhs));
        for (const IntVec& s : box_solutions(a, rhs, 8)) {
            bool represented = false;
            for (const IntVec& m : sol.minimal) {
                if (!dominated(m, s)) continue;
                IntVec diff = sub(s, m);
                if (sol.periods.empty()) {
                    represented = is_zero(diff);
                } else {
                    IntMat comb(n, static_cast<int>(sol.periods.size()));
                    for (int row = 0; row < n; ++row)
                        for (std::size_t k = 0; k < sol.periods.size(); ++k)
                            comb.at(row, static_cast<int>(k)) = sol.periods[k][row];
                    represented = is_feasible(LinearSystem(comb, diff));
                }
                if (represented) break;
            }
            CHECK(represented);
        }
    }
}

TEST_CASE("feasibility") {
    CHECK(is_feasible(sys({{1, 1}}, {2})));
    CHECK(!is_feasible(sys({{2}}, {1})));
    CHECK(is_feasible(LinearSystem(IntMat(0, 0), IntVec{})));
    CHECK(is_feasible(LinearSystem(IntMat(1, 0), IntVec{0})));
    CHECK(!is_feasible(LinearSystem(IntMat(1, 0), IntVec{1})));
}

TEST_CASE("variable boundedness") {
    CHECK(is_unbounded(sys({{1, -1}}, {0}), 0));
    CHECK(!is_unbounded(sys({{1, 1}}, {2}), 0));
    CHECK(is_unbounded(sys({{1, -2}}, {0}), 1));
    CHECK_THROWS_AS((void)is_unbounded(sys({{2}}, {1}), 0), InputError);
}

TEST_CASE("is_unbounded agrees with hilbert supports") {
    Rng rng(99);
    for (int iter = 0; iter < 20; ++iter) {
        int n = rnd_int(rng, 2, 5);
        int r = rnd_int(rng, 1, 2);
        IntMat a(r, n);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < n; ++j) a.at(i, j) = rnd_int(rng, -2, 2);
        LinearSystem s(a, zero_vec(r));
        auto hb = hilbert_basis(a).generators;
        for (int v = 0; v < n; ++v) {
            bool via_lp = is_unbounded(s, v);
            bool via_hb = false;
            for (const IntVec& g : hb) via_hb = via_hb || g[v] > 0;
            CHECK(via_lp == via_hb);
        }
    }
}

TEST_CASE("bounded values") {
    CHECK(bounded_values(sys({{1, 1}}, {2}), {0}) ==
          std::vector<IntVec>{{0}, {1}, {2}});
    CHECK(bounded_values(sys({{1, 1}, {1, -1}}, {2, 0}), {0, 1}) ==
          std::vector<IntVec>{{1, 1}});
    CHECK(bounded_values(sys({{1}}, {3}), {0}) == std::vector<IntVec>{{3}});
    CHECK_THROWS_AS((void)bounded_values(sys({{1, -1}}, {0}), {0}), InputError);
}

TEST_CASE("integer lattice membership") {
    CHECK(z_membership({{1, 1}}, {2, 2}).has_value());
    CHECK(!z_membership({{1, 1}}, {1, 0}).has_value());
    auto w = z_membership({{2, 0}, {1, 1}}, {1, -1});
    REQUIRE(w.has_value());
    // witness reconstructs v
    IntVec got = zero_vec(2);
    std::vector<IntVec> f = {{2, 0}, {1, 1}};
    for (std::size_t j = 0; j < f.size(); ++j) got = add(got, scale((*w)[j], f[j]));
    CHECK(got == IntVec{1, -1});
    CHECK(z_membership({}, {0, 0}).has_value());
    CHECK(!z_membership({}, {1, 0}).has_value());
}

TEST_CASE("rational cone membership") {
    CHECK(cone_membership({{1, 0}, {0, 1}}, {3, 4}));
    CHECK(!cone_membership({{1, 1}}, {1, 0}));
    CHECK(cone_membership({{1, 2}, {2, 1}}, {1, 1}));
    CHECK(cone_membership({}, {0, 0}));
    CHECK(!cone_membership({{1, 0}}, {0, 1}));
}

TEST_CASE("smith normal form invariant u*m*v = diag") {
    Rng rng(31337);
    for (int iter = 0; iter < 30; ++iter) {
        int r = rnd_int(rng, 1, 4), c = rnd_int(rng, 1, 4);
        IntMat m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m.at(i, j) = rnd_int(rng, -5, 5);
        SmithForm sf = smith_form(m);
        // compute u*m*v
        IntMat um(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) {
                Int s = 0;
                for (int k = 0; k < r; ++k) s += sf.u.at(i, k) * m.at(k, j);
                um.at(i, j) = s;
            }
        IntMat umv(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) {
                Int s = 0;
                for (int k = 0; k < c; ++k) s += um.at(i, k) * sf.v.at(k, j);
                umv.at(i, j) = s;
            }
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) {
                if (i == j && i < sf.rank) {
                    CHECK(umv.at(i, j) == sf.diag[i]);
                    if (i > 0) CHECK(sf.diag[i] % sf.diag[i - 1] == 0);
                } else {
                    CHECK(umv.at(i, j) == 0);
                }
            }
    }
}

TEST_CASE("deterministic outputs") {
    IntMat a = mat({{1, -2, 1}, {0, 1, -1}});
    auto h1 = hilbert_basis(a).generators;
    auto h2 = hilbert_basis(a).generators;
    CHECK(h1 == h2);
    auto m1 = minimal_solutions(LinearSystem(a, {1, 0}));
    auto m2 = minimal_solutions(LinearSystem(a, {1, 0}));
    CHECK(m1 == m2);
}
