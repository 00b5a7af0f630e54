#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "support.hpp"

using namespace siegel;
using namespace testsupport;

TEST_CASE("diagonalize examples") {
    auto c3 = PrimeCtx::make(3);
    auto L = diag_lattice(c3, {1, 3, 27});
    auto d = diagonalize(L);
    CHECK(d == std::vector<DiagEntry>{{0, 1}, {1, 1}, {3, 1}});

    auto M = make_lattice(c3, {{6, 3}, {3, 3}});
    auto dm = diagonalize(M);
    REQUIRE(dm.size() == 2);
    CHECK(dm[0].a == 1);
    CHECK(dm[1].a == 1);
    CHECK(dm[0].u * dm[1].u == unit_class(determinant(M.gram) / 9, 3));
    CHECK(fundamental_invariants(M) == std::vector<int>{1, 1});

    for (long p : {3L, 5L, 7L, 11L}) {
        auto ctx = PrimeCtx::make(p);
        CHECK(legendre(static_cast<i64>(ctx.r), p) == -1);
        CHECK(diagonalize(diag_lattice(ctx, {Q(ctx.r)})) == std::vector<DiagEntry>{{0, -1}});
    }
    CHECK_THROWS_AS(make_lattice(c3, {{1, 1}, {1, 1}}), Error);
}

TEST_CASE("fundamental invariants and errors") {
    auto c3 = PrimeCtx::make(3);
    CHECK(fundamental_invariants(diag_lattice(c3, {1, 1})) == std::vector<int>{0, 0});
    CHECK(fundamental_invariants(diag_lattice(c3, {3, 3, 3})) == std::vector<int>{1, 1, 1});
    try {
        fundamental_invariants(diag_lattice(c3, {Q(1, 3)}));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == "NotIntegral");
    }
}

TEST_CASE("invariants examples") {
    for (long p : {3L, 5L, 7L}) {
        auto ctx = PrimeCtx::make(p);
        CHECK(invariants(diag_lattice(ctx, {Q(ctx.r)})).chi == -1);
        auto h = invariants(diag_lattice(ctx, {1, -1}));
        CHECK(h.disc == 1);
        CHECK(h.chi == 1);
        auto pp = invariants(diag_lattice(ctx, {Q(p), Q(p)}));
        CHECK(pp.chi == legendre(static_cast<i64>(-1), p));
        CHECK(pp.val == 2);
        CHECK(pp.type == 2);
        CHECK(invariants(diag_lattice(ctx, {Q(p)})).chi == 0);
    }
}

TEST_CASE("hilbert symbol") {
    for (long p : {3L, 5L, 7L}) {
        auto ctx = PrimeCtx::make(p);
        for (long u = 1; u < p; ++u) {
            for (long v = 1; v < p; ++v) CHECK(hilbert_symbol(Q(u), Q(v), ctx) == 1);
            CHECK(hilbert_symbol(Q(p), Q(u), ctx) == legendre(static_cast<i64>(u), p));
        }
        CHECK(hilbert_symbol(Q(p), Q(p), ctx) == legendre(static_cast<i64>(-1), p));
        CHECK_THROWS_AS(hilbert_symbol(Q(0), Q(1), ctx), Error);

        std::mt19937_64 rng(17 + p);
        auto rnd = [&]() {
            long num = static_cast<long>(rng() % 200) + 1;
            int e = static_cast<int>(rng() % 5) - 2;
            Q x = Q(num) * qpow(p, e);
            return (rng() % 2) ? x : Q(-x);
        };
        for (int trial = 0; trial < 1000; ++trial) {
            Q a = rnd(), b = rnd(), c = rnd();
            CHECK(hilbert_symbol(a * b, c, ctx) == hilbert_symbol(a, c, ctx) * hilbert_symbol(b, c, ctx));
            CHECK(hilbert_symbol(a, b, ctx) == hilbert_symbol(b, a, ctx));
        }
    }
}

TEST_CASE("dual, direct sum, rescale") {
    auto c3 = PrimeCtx::make(3);
    auto D = dual(diag_lattice(c3, {3, 27}));
    CHECK(D.gram == Mat{{Q(1, 3), 0}, {0, Q(1, 27)}});
    CHECK(rescale(diag_lattice(c3, {1, 3}), 2).gram == Mat{{9, 0}, {0, 27}});
    CHECK_THROWS_AS(direct_sum(diag_lattice(c3, {1}), diag_lattice(PrimeCtx::make(5), {1})), Error);

    for (long p : {3L, 5L, 7L}) {
        auto ctx = PrimeCtx::make(p);
        std::mt19937_64 rng(100 + p);
        for (int trial = 0; trial < 10; ++trial) {
            auto L = random_lattice(ctx, 1 + trial % 3, 3, rng);
            CHECK(jordan_profile(dual(dual(L))) == jordan_profile(L));
        }
        for (int trial = 0; trial < 200; ++trial) {
            auto A = random_lattice(ctx, 1 + trial % 3, 3, rng);
            auto B = random_lattice(ctx, 1 + (trial / 3) % 3, 3, rng);
            auto S = direct_sum(A, B);
            auto ia = invariants(A), ib = invariants(B), is = invariants(S);
            CHECK(is.hasse == ia.hasse * ib.hasse * hilbert_symbol(ia.det, ib.det, ctx));
            CHECK(is.det == ia.det * ib.det);
            int na = A.rank(), nb = B.rank();
            Q sign = ((na * nb) % 2 == 0) ? Q(1) : Q(-1);
            CHECK(is.disc == sign * ia.disc * ib.disc);
            CHECK(is.val == ia.val + ib.val);
        }
    }
}

TEST_CASE("isometry-class soundness under base change") {
    for (long p : {3L, 5L, 7L}) {
        auto ctx = PrimeCtx::make(p);
        std::mt19937_64 rng(7 * p);
        for (int trial = 0; trial < 200; ++trial) {
            auto L = random_lattice(ctx, 1 + trial % 4, 3, rng);
            auto L2 = scramble(L, rng);
            CHECK(jordan_profile(L) == jordan_profile(L2));
            auto i1 = invariants(L), i2 = invariants(L2);
            CHECK(i1.val == i2.val);
            CHECK(i1.type == i2.type);
            CHECK(i1.chi == i2.chi);
            CHECK(i1.hasse == i2.hasse);
            CHECK(is_vertex(L).vertex == is_vertex(L2).vertex);
            CHECK(is_vertex(L).t == is_vertex(L2).t);
            auto iD = invariants(dual(L));
            CHECK(iD.val == -i1.val);
            CHECK(iD.chi == i1.chi);
        }
    }
}

TEST_CASE("vertex lattices") {
    auto c3 = PrimeCtx::make(3);
    auto v = is_vertex(diag_lattice(c3, {1, 3}));
    CHECK(v.vertex);
    CHECK(v.t == 1);
    CHECK_FALSE(is_vertex(diag_lattice(c3, {9})).vertex);
    auto v4 = is_vertex(diag_lattice(c3, {3, 3, 3, 3}));
    CHECK(v4.vertex);
    CHECK(v4.t == 4);
}

TEST_CASE("ambient spaces") {
    for (long p : {3L, 5L, 7L}) {
        auto ctx = PrimeCtx::make(p);
        CHECK(ambient_space(2, 1, 1, ctx).gram == Mat{{1, 0}, {0, -1}});
        for (int m = 1; m <= 6; ++m)
            for (int eps : {-1, 0, 1})
                for (int h : {-1, 1}) {
                    bool inadmissible = (m == 1 && h == -1) || (m == 2 && eps == 1 && h == -1);
                    if (inadmissible) {
                        CHECK_THROWS_AS(ambient_space(m, eps, h, ctx), Error);
                        continue;
                    }
                    auto V = ambient_space(m, eps, h, ctx);
                    auto inv = invariants(V);
                    CHECK(V.rank() == m);
                    CHECK(inv.chi == eps);
                    CHECK(inv.hasse == h);
                }
        for (int m = 1; m <= 6; ++m)
            for (int eps : {-1, 1}) {
                auto H = self_dual(m, eps, ctx);
                auto inv = invariants(H);
                CHECK(inv.val == 0);
                CHECK(inv.chi == eps);
                CHECK(inv.hasse == 1);
            }
    }
}

TEST_CASE("orthogonal complement") {
    auto c3 = PrimeCtx::make(3);
    Mat G = identity(3);
    auto comp = orthogonal_complement(G, {Vec{1, 0, 0}});
    CHECK(comp.size() == 2);
    for (auto& v : comp) CHECK(v[0] == 0);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto L = random_lattice(c3, 4, 2, rng);
        Vec x(4);
        for (auto& c : x) c = static_cast<long>(rng() % 5) - 2;
        if (dot_form(L.gram, x, x) == 0) continue;
        auto perp = orthogonal_complement(L.gram, {x});
        CHECK(perp.size() == 3);
        for (auto& v : perp) CHECK(dot_form(L.gram, x, v) == 0);
        Mat B(4, Vec(3));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 3; ++j) B[i][j] = perp[j][i];
        CHECK(determinant(base_change(L, B).gram) != 0);
    }
    CHECK_THROWS_AS(orthogonal_complement(diag_lattice(c3, {1, -1}).gram, {Vec{1, 1}}), Error);
}
