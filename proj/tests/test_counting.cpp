#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "siegel/counting.hpp"
#include "support.hpp"

using namespace siegel;
using namespace testsupport;

namespace {

// Rank-t type-t diagonal lattices with val <= max_val, one per Jordan class.
std::vector<QuadLattice> type_t_grid(const PrimeCtx& ctx, int t, int max_val) {
    std::vector<QuadLattice> out;
    for (auto& L : lattice_grid(ctx, t, max_val))
        if (invariants(L).type == t) out.push_back(L);
    return out;
}

}  // namespace

TEST_CASE("base-case tables") {
    for (long q : {3L, 5L}) {
        auto ctx = PrimeCtx::make(q);
        for (int t : {3, 5}) {
            if (q == 5 && t == 5) continue;
            // vertex lattice, odd type
            auto V = diag_form(ctx, std::vector<int>(t, 1), std::vector<int>(t, 1));
            auto mu = mu_profile(V);
            CHECK(mu.plus == 1);
            CHECK(mu.zero == 0);
            CHECK(mu.minus == zpow(q, t - 1) - 1);
            for (int s : {1, -1}) CHECK(counting_odd_value(mu, t, s, q) == 0);
            // invariants (1,...,1,2)
            for (int mask = 0; mask < 4; ++mask) {
                std::vector<int> a(t, 1), u(t, 1);
                a[t - 1] = 2;
                u[t - 2] = mask & 1 ? -1 : 1;
                u[t - 1] = mask & 2 ? -1 : 1;
                auto L = diag_form(ctx, a, u);
                auto m2 = mu_profile(L);
                std::vector<int> a0(t - 1, 1), u0(u.begin(), u.end() - 1);
                int s = invariants(diag_form(ctx, a0, u0)).chi;
                CHECK(m2.plus == 1);
                CHECK(m2.zero == q - 1);
                CHECK(m2.zero_s(s) == q - 1);
                CHECK(m2.zero_s(-s) == 0);
                Z expect = (zpow(q, (t - 1) / 2) - s) * (zpow(q, (t - 3) / 2) + s) * q;
                CHECK(m2.minus == expect);
                CHECK(check_counting_odd(L, 1).ok);
            }
        }
        for (int t : {2, 4}) {
            for (int mask = 0; mask < 4; ++mask) {
                std::vector<int> a(t, 1), u(t, 1);
                a[t - 1] = 2;
                u[0] = mask & 1 ? -1 : 1;
                u[t - 1] = mask & 2 ? -1 : 1;
                auto L = diag_form(ctx, a, u);
                auto mu = mu_profile(L);
                CHECK(mu.plus == 1);
                CHECK(mu.zero == q - 1);
                // the count of (L^dual)° is q^(t-1), so mu_minus is q^(t-1) - q
                CHECK(mu.minus == zpow(q, t - 1) - q);
                for (int s : {1, -1}) CHECK(check_counting_even(L, s).ok);
                // vertex lattice of even type
                auto V = diag_form(ctx, std::vector<int>(t, 1), u);
                auto mv = mu_profile(V);
                int s = invariants(V).chi;
                CHECK(mv.plus == 1);
                CHECK(mv.zero == 0);
                CHECK(mv.minus == (zpow(q, t / 2) - s) * (zpow(q, t / 2 - 1) + s));
            }
        }
    }
}

TEST_CASE("shape and admissibility errors") {
    auto ctx = PrimeCtx::make(3);
    CHECK_THROWS_AS(mu_profile(diag_lattice(ctx, {Q(3)})), Error);
    CHECK_THROWS_AS(mu_profile(diag_lattice(ctx, {Q(1), Q(3)})), Error);
    auto L = diag_lattice(ctx, {Q(3), Q(3), Q(9)});
    CHECK(invariants(L).chi != 0);
    try {
        check_counting_odd(L, -1);
        FAIL("expected InadmissiblePair");
    } catch (const Error& e) {
        CHECK(e.code() == "InadmissiblePair");
    }
    CHECK_THROWS_AS(check_counting_even(L, 1), Error);
}

TEST_CASE("fast profile agrees with the literal scan") {
    int compared = 0;
    for (long p : {3L, 5L}) {
        auto ctx = PrimeCtx::make(p);
        for (int t = 2; t <= 3; ++t)
            for (auto& L : type_t_grid(ctx, t, t + 3)) {
                CHECK(mu_profile(L) == brute::mu_profile(L));
                ++compared;
            }
        // non-diagonal bases
        std::mt19937_64 rng(p);
        for (int trial = 0; trial < 5; ++trial) {
            auto L = scramble(diag_form(ctx, {1, 2, 3}, {1, trial % 2 ? -1 : 1, 1}), rng);
            CHECK(mu_profile(L) == brute::mu_profile(L));
        }
    }
    CHECK(compared > 40);
}

TEST_CASE("translation invariance of the coset classes") {
    for (long p : {3L, 5L}) {
        auto R = mu_translation_invariance(50, PrimeCtx::make(p), 99 + p);
        CHECK_MESSAGE(R.ok, R.first_failure());
    }
}

TEST_CASE("counting identities on the grid") {
    int checked = 0;
    for (long p : {3L, 5L}) {
        auto ctx = PrimeCtx::make(p);
        for (int t = 2; t <= 4; ++t)
            for (auto& L : type_t_grid(ctx, t, t + 4))
                for (int s : {1, -1}) {
                    bool odd = t % 2 == 1;
                    if (!(odd ? counting_odd_admissible(L, s) : counting_even_admissible(L, s))) continue;
                    auto R = odd ? check_counting_odd(L, s) : check_counting_even(L, s);
                    CHECK_MESSAGE(R.ok, R.first_failure());
                    ++checked;
                }
    }
    CHECK(checked > 100);
    MESSAGE("admissible pairs: " << checked);
}

TEST_CASE("spot values") {
    // t = 3, val = 5, p = 3; t = 2, val = 6, p = 5
    auto c3 = PrimeCtx::make(3);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<int> u = {rng() % 2 ? 1 : -1, rng() % 2 ? 1 : -1, rng() % 2 ? 1 : -1};
        auto L = diag_form(c3, trial % 2 ? std::vector<int>{1, 1, 3} : std::vector<int>{1, 2, 2}, u);
        CHECK(check_counting_odd(L, 1).ok);
        if (invariants(L).chi == 0) CHECK(check_counting_odd(L, -1).ok);
    }
    auto c5 = PrimeCtx::make(5);
    for (auto a : {std::vector<int>{1, 5}, std::vector<int>{2, 4}, std::vector<int>{3, 3}})
        for (int s : {1, -1}) {
            auto L = diag_form(c5, a, {1, 1});
            if (counting_even_admissible(L, s)) CHECK(check_counting_even(L, s).ok);
            auto Lr = diag_form(c5, a, {1, -1});
            if (counting_even_admissible(Lr, s)) CHECK(check_counting_even(Lr, s).ok);
        }
}

TEST_CASE("companion lattices and the difference identities") {
    int with = 0, without = 0;
    for (long p : {3L, 5L}) {
        auto ctx = PrimeCtx::make(p);
        for (int t = 2; t <= 4; ++t)
            for (auto& L : type_t_grid(ctx, t, t + 3)) {
                int val = invariants(L).val;
                auto muL = mu_profile(L);
                // the trace identity holds for every intermediate M of type t
                for (auto& M : index_q_type_t_overlattices(L)) {
                    auto D = mu_difference(muL, mu_profile(M), p);
                    CHECK(D.plus + D.zero + D.minus == zpow(p, t - 1) * D.plus);
                }
                if (val <= t + 1) continue;
                auto C = companion_lattice(L);
                if (!C) {
                    ++without;
                    // only an anisotropic scale-p^2 plane on top of scale-p entries
                    auto a = fundamental_invariants(L);
                    CHECK(a[t - 1] == 2);
                    CHECK(index_q_type_t_overlattices(L).empty());
                    continue;
                }
                ++with;
                CHECK(invariants(C->M).val == val - 2);
                auto D = mu_difference(muL, mu_profile(C->M), p);
                if (t % 2 == 1) {
                    if (invariants(L).chi != 0) CHECK(D.zero_plus == D.zero_minus);
                } else {
                    CHECK(D.plus + D.zero == p * D.plus);
                }
            }
    }
    CHECK(with > 20);
    MESSAGE("companions: " << with << " found, " << without << " missing");
}

TEST_CASE("perpendicular jump sum") {
    for (long p : {3L, 5L}) {
        auto ctx = PrimeCtx::make(p);
        // one self-dual overlattice: horizontal, so nothing survives
        for (int e : {1, -1}) {
            auto H = self_dual(2, e, ctx);
            for (int eps : {1, -1}) {
                CHECK(pden_perp_jump(H, Q(p), eps).is_zero());
                CHECK(perp_jump_inner(H, Q(p), eps) == -eps * e);
            }
        }
        std::vector<QuadLattice> pool;
        for (int r = 1; r <= 3; ++r)
            for (auto& L : lattice_grid(ctx, r, r == 3 ? 3 : 5)) pool.push_back(L);
        int aniso = 0, iso = 0;
        for (auto& L : pool)
            for (int eps : {1, -1}) {
                std::vector<Q> W;
                try {
                    W = complement_plane(L, eps);
                } catch (const Error&) {
                    continue;
                }
                // norms of vectors a w1 + b w2 with val >= 1
                std::vector<Q> norms;
                for (int k = 0; k <= 3 && norms.size() < 10; ++k)
                    for (long a0 = 0; a0 < p && norms.size() < 10; ++a0)
                        for (long b0 = 0; b0 < p && norms.size() < 10; ++b0) {
                            Q nn = (W[0] * a0 * a0 + W[1] * b0 * b0) * qpow(p, 2 * k);
                            if (nn == 0 || vp(nn, p) < 1) continue;
                            if (std::find(norms.begin(), norms.end(), nn) == norms.end()) norms.push_back(nn);
                        }
                REQUIRE(norms.size() >= 3);
                bool coiso = invariants(L).chi == eps;
                QSqrt first = pden_perp_jump(L, norms[0], eps);
                for (auto& nn : norms) {
                    QSqrt v = pden_perp_jump(L, nn, eps);
                    if (!coiso)
                        CHECK_MESSAGE(v.is_zero(), "p=" << p << " norm " << to_string(nn) << " -> " << v.str());
                    else
                        CHECK_MESSAGE(v == first, "p=" << p << " norm " << to_string(nn) << " -> " << v.str());
                }
                (coiso ? iso : aniso)++;
            }
        CHECK(aniso > 10);
        CHECK(iso > 3);
    }
    auto ctx = PrimeCtx::make(3);
    CHECK_THROWS_AS(pden_perp_jump(diag_lattice(ctx, {Q(1)}), Q(1), 1), Error);
}
