#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "siegel/geometry.hpp"
#include "support.hpp"

using namespace siegel;
using namespace testsupport;

TEST_CASE("horizontal predicates") {
    for (long p : {3L, 5L}) {
        auto ctx = PrimeCtx::make(p);
        for (int a = 0; a <= 4; ++a)
            for (int eps : {1, -1}) CHECK(is_horizontal(diag_form(ctx, {a}, {1}), 2, eps));
        auto pp = diag_lattice(ctx, {Q(p), Q(p)});
        CHECK(is_horizontal(pp, 3, 1));
        CHECK_FALSE(is_horizontal(pp, 3, -1));
        CHECK_THROWS_AS(is_horizontal(pp, 4, 1), Error);
        CHECK_FALSE(is_horizontal(diag_lattice(ctx, {Q(1, p)}), 2, 1));
        // three scales of positive valuation never qualify
        CHECK_FALSE(is_horizontal(diag_lattice(ctx, {Q(p), Q(p), Q(p)}), 4, 1));

        for (int eps : {1, -1}) {
            auto H = self_dual(2, eps, ctx);
            auto hs = hor_set(H, eps);
            REQUIRE(hs.size() == 1);
            CHECK(hs[0].ell == 0);
        }
        // diag(p^2, p) and diag(1, p); the type-2 lattice only counts for eps = +1
        CHECK(hor_set(diag_lattice(ctx, {Q(p * p), Q(p)}), 1).size() == 2);
        CHECK(hor_set(diag_lattice(ctx, {Q(p * p), Q(p)}), -1).size() == 1);
    }
}

TEST_CASE("quasi-canonical and primitive degrees") {
    for (long q : {3L, 5L, 7L}) {
        CHECK(quasi_canonical_degree(0, false, q) == 1);
        CHECK(quasi_canonical_degree(1, false, q) == q + 1);
        CHECK(quasi_canonical_degree(0, true, q) == 2);
        CHECK(quasi_canonical_degree(2, true, q) == 2 * q * q);
        CHECK(quasi_canonical_degree(3, false, q) == q * q * q + q * q);
        auto ctx = PrimeCtx::make(q);
        for (int eps : {1, -1}) {
            CHECK(primitive_degree(self_dual(2, eps, ctx), eps) == 1);
            CHECK(primitive_degree(diag_lattice(ctx, {Q(1), Q(q * q)}), eps) == q + 1);
            // rank 1: the primitive degree is the top quasi-canonical degree
            for (int a = 0; a <= 5; ++a)
                for (int u : {1, -1}) {
                    auto M = diag_form(ctx, {a}, {u});
                    if (invariants(M).chi == 1) continue;
                    bool ram = a % 2 == 1;
                    CHECK(primitive_degree(M, eps) == quasi_canonical_degree(a / 2, ram, q));
                }
        }
        CHECK_THROWS_AS(primitive_degree(diag_lattice(ctx, {Q(q), Q(q)}), -1), Error);
    }
}

TEST_CASE("horizontal degree matches the even-corank series at 1") {
    int coaniso = 0, coiso = 0;
    for (long p : {3L, 5L}) {
        auto ctx = PrimeCtx::make(p);
        for (int r = 1; r <= 3; ++r)
            for (const auto& L : lattice_grid(ctx, r, 5))
                for (int eps : {1, -1}) {
                    int chi = invariants(L).chi;
                    Z hd = horizontal_degree(L, eps);
                    if (chi != eps) {
                        Q f = den_flat_at_1(L, eps);
                        CHECK(Q(hd) == (chi == 0 ? 2 * f : f));
                        ++coaniso;
                    } else if (embeds_in_space(L, r + 2, eps, -1)) {
                        CHECK(hd == 0);
                        CHECK(hor_set(L, eps).empty());
                        ++coiso;
                    }
                }
    }
    CHECK(coaniso > 100);
    CHECK(coiso > 10);
}

TEST_CASE("pden difference") {
    for (long p : {3L, 5L}) {
        auto ctx = PrimeCtx::make(p);
        for (int u : {1, -1})
            for (int eps : {1, -1}) {
                auto unit = diag_form(ctx, {0}, {u});
                if (invariants(unit).chi != eps) {
                    auto R = pden_difference_check(unit, eps);
                    CHECK_MESSAGE(R.ok, R.first_failure());
                }
                auto ram = diag_form(ctx, {1}, {u});
                auto R = pden_difference_check(ram, eps);
                CHECK_MESSAGE(R.ok, R.first_failure());
            }
        std::mt19937_64 rng(100 + p);
        int done = 0;
        while (done < 15) {
            auto L = random_lattice(ctx, 1 + static_cast<int>(rng() % 2), 3, rng);
            int eps = (rng() % 2) ? 1 : -1;
            if (invariants(L).chi == eps) continue;
            auto R = pden_difference_check(L, eps);
            CHECK_MESSAGE(R.ok, R.first_failure());
            ++done;
        }
        CHECK_THROWS_AS(pden_difference_check(self_dual(2, 1, ctx), 1), Error);
    }
}

TEST_CASE("intersection numbers") {
    for (long p : {3L, 5L, 7L}) {
        auto ctx = PrimeCtx::make(p);
        int seen = 0;
        for (int mask = 0; mask < 8; ++mask) {
            auto L = diag_form(ctx, {1, 1, 1}, {mask & 1 ? -1 : 1, mask & 2 ? -1 : 1, mask & 4 ? -1 : 1});
            auto I = intersection_number(L, -1);
            if (!I.realizable) {
                CHECK(I.value == 0);
                continue;
            }
            ++seen;
            CHECK(I.value == 3 - p);
        }
        CHECK(seen > 0);
        CHECK(intersection_number(diag_lattice(ctx, {Q(1, p), Q(1), Q(1)}), 1).value == 0);

        // cancellation against a self-dual summand
        std::mt19937_64 rng(p);
        for (int trial = 0; trial < 10; ++trial) {
            auto Lf = random_lattice(ctx, 2, 3, rng);
            auto M = self_dual(1 + trial % 2, trial % 3 ? 1 : -1, ctx);
            for (int eps : {1, -1}) {
                auto big = direct_sum(Lf, M);
                auto I = intersection_number(big, eps);
                int e2 = cancellation_sign(Lf.rank(), M, eps);
                auto J = intersection_number(Lf, e2);
                CHECK(I.realizable == J.realizable);
                CHECK(I.value == J.value);
            }
        }
    }
}

TEST_CASE("Q(sqrt q) and the Hermite form") {
    long q = 3;
    CHECK(half_power(q, 2) == QSqrt(3));
    CHECK(half_power(q, -2) == QSqrt(Q(1, 3)));
    CHECK(half_power(q, 1) == QSqrt(0, 1));
    CHECK(half_power(q, -1) == QSqrt(0, Q(1, 3)));
    CHECK(mul(half_power(q, 3), half_power(q, -3), q) == QSqrt(1));
    Mat A = {{Q(2), Q(1)}, {Q(0), Q(3)}};
    Mat B = {{Q(2), Q(3)}, {Q(0), Q(3)}};
    CHECK(lattice_hnf(A, 3) == lattice_hnf(B, 3));
    CHECK(lattice_hnf({{Q(1), Q(0), Q(1, 3)}, {Q(0), Q(1), Q(0)}}, 3) == lattice_hnf({{Q(1, 3), Q(0)}, {Q(0), Q(1)}}, 3));
}

TEST_CASE("indicator combinations") {
    for (long p : {3L, 5L}) {
        auto ctx = PrimeCtx::make(p);
        auto base = diag_lattice(ctx, {Q(1), Q(-1)});
        // the p+1 index-p sublattices sum to 1_L + p 1_{pL}
        IndicatorCombo lhs{base, {}}, rhs{base, {}};
        for (long c = 0; c <= p; ++c) {
            Mat B = c < p ? Mat{{Q(1), Q(0)}, {Q(c), Q(p)}} : Mat{{Q(p), Q(0)}, {Q(0), Q(1)}};
            lhs.add(B, QSqrt(1));
        }
        rhs.add(identity(2), QSqrt(1));
        rhs.add(Mat{{Q(p), Q(0)}, {Q(0), Q(p)}}, QSqrt(p));
        CHECK(lhs.terms.size() == static_cast<size_t>(p + 1));
        CHECK(combos_equal(lhs, rhs));
        CHECK(combos_equal(fourier(lhs), fourier(rhs)));

        IndicatorCombo one{base, {}};
        one.add(identity(2), QSqrt(1));
        CHECK(combos_equal(fourier(one), one));
        CHECK(fourier(one).terms.size() == 1);

        // double transform on random combos
        std::mt19937_64 rng(11 * p);
        auto amb = diag_lattice(ctx, {Q(1), Q(p), Q(-1)});
        for (int trial = 0; trial < 20; ++trial) {
            IndicatorCombo C{amb, {}};
            for (int k = 0; k < 3; ++k) {
                Mat B = identity(3);
                for (auto& row : B)
                    for (auto& x : row) x = x * qpow(p, static_cast<int>(rng() % 3) - 1) + Q(static_cast<long>(rng() % 2));
                if (determinant(B) == 0) continue;
                C.add(B, QSqrt(static_cast<long>(rng() % 5) - 2, static_cast<long>(rng() % 3) - 1));
            }
            CHECK(combos_equal(fourier(fourier(C)), C));
        }
    }
}

TEST_CASE("vertex lattices and local modularity") {
    for (long p : {3L, 5L}) {
        auto ctx = PrimeCtx::make(p);
        int checked = 0;
        for (int m : {4, 5, 6})
            for (int eps : {1, -1}) {
                if (t_max(m, eps) < 4) {
                    CHECK_THROWS_AS(make_vertex_lattice(m, eps, 1, ctx), Error);
                    continue;
                }
                auto all = vertex_lattices(m, eps, 1, ctx);
                CHECK(!all.empty());
                for (auto& V : all) {
                    CHECK(V.chi_W() == -1);
                    auto x0 = Vec(m, Q(0));
                    CHECK(int_V_Lambda(V, x0) == 1 - p);
                    Vec xd(m, Q(0));
                    xd[0] = Q(1, p);
                    Q nn = dot_form(V.lattice.gram, xd, xd);
                    CHECK(int_V_Lambda(V, xd) == (vp(nn, p) >= 0 ? 1 : 0));
                    Vec far(m, Q(0));
                    far[0] = Q(1, p * p);
                    CHECK(int_V_Lambda(V, far) == 0);
                    auto R = check_local_modularity(V);
                    CHECK_MESSAGE(R.ok, R.first_failure());
                    ++checked;
                }
            }
        CHECK(checked >= 4);
    }
}

TEST_CASE("higher type c-combination") {
    auto ctx = PrimeCtx::make(3);
    auto V = make_vertex_lattice(6, -1, 2, ctx);
    CHECK(c_const(2, 3) == -2);
    CHECK(c_prime(2, 3) == 28);
    CHECK(isotropic_subspaces(V.W, 1, 3).size() == 112);
    auto R = check_local_modularity(V);
    CHECK_MESSAGE(R.ok, R.first_failure());
    CHECK_THROWS_AS(make_vertex_lattice(6, 1, 2, ctx), Error);
}

TEST_CASE("saturated sublattices are horizontal") {
    for (int m : {4, 5})
        for (int eps : {1, -1}) {
            SaturatedStats S;
            auto R = saturated_horizontal_property(100, m, eps, PrimeCtx::make(3), 1234 + m, &S);
            CHECK_MESSAGE(R.ok, R.first_failure());
            CHECK(S.tried > 80);
            CHECK(S.used > 10);
        }
    auto ctx = PrimeCtx::make(3);
    CHECK(t_max(5, 1) == 4);
    CHECK_FALSE(is_horizontal(diag_lattice(ctx, {Q(3), Q(3), Q(3)}), 4, 1));
}
