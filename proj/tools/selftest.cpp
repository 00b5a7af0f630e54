#include <functional>

#include "cli_common.hpp"
#include "siegel/counting.hpp"
#include "siegel/finite_quad.hpp"
#include "siegel/geometry.hpp"
#include "siegel/oracle.hpp"
#include "siegel/overlattice.hpp"

namespace cli {

using namespace siegel;

namespace {

QuadLattice diag_form(const PrimeCtx& ctx, const std::vector<int>& a, const std::vector<int>& u) {
    std::vector<Q> d;
    for (size_t i = 0; i < a.size(); ++i) d.push_back(Q(u[i] > 0 ? 1 : ctx.r) * qpow(ctx.p, a[i]));
    return diag_lattice(ctx, d);
}

struct Suite {
    std::vector<Json> cases;
    void run(const std::string& name, const std::function<std::string()>& body) {
        Json c;
        c["name"] = name;
        std::string why;
        try {
            why = body();
        } catch (const std::exception& e) {
            why = std::string("threw: ") + e.what();
        }
        c["ok"] = why.empty();
        if (!why.empty()) c["why"] = why;
        cases.push_back(c);
    }
};

std::string expect_eq(const Q& got, const Q& want) {
    return got == want ? std::string() : "got " + to_string(got) + ", want " + to_string(want);
}

// Lattices of rank <= 2 with chi = eps that sit in the Hasse -1 space of dimension rank + 2.
std::vector<QuadLattice> coisotropic_examples(const PrimeCtx& ctx, int eps) {
    std::vector<QuadLattice> out;
    for (int a0 = 0; a0 <= 2; ++a0)
        for (int a1 = a0; a1 <= 2; ++a1)
            for (int mask = 0; mask < 4; ++mask) {
                auto L = diag_form(ctx, {a0, a1}, {mask & 1 ? -1 : 1, mask & 2 ? -1 : 1});
                if (invariants(L).chi == eps && embeds_in_space(L, 4, eps, -1)) out.push_back(L);
            }
    return out;
}

}  // namespace

Json run_selftest(const RunConfig& cfg) {
    Suite S;
    const std::vector<long> primes = {3, 5, 7};

    S.run("Hasse invariant of an orthogonal sum", [&] {
        for (long p : primes) {
            auto ctx = PrimeCtx::make(p);
            for (unsigned long long i = 0; i < 30; ++i) {
                auto rng = case_rng(cfg.seed, i);
                auto W1 = random_lattice(ctx, 1 + static_cast<int>(rng() % 3), 3, rng);
                auto W2 = random_lattice(ctx, 1 + static_cast<int>(rng() % 3), 3, rng);
                auto I1 = invariants(W1), I2 = invariants(W2);
                int want = I1.hasse * I2.hasse * hilbert_symbol(I1.det, I2.det, ctx);
                if (invariants(direct_sum(W1, W2)).hasse != want) return "p=" + std::to_string(p) + " pair " + std::to_string(i);
            }
        }
        return std::string();
    });

    S.run("orthogonal group of the zero space", [&] {
        for (long q : primes)
            if (order_orthogonal(FiniteQuadSpace{q, 0, 0, 1}) != 1) return "q=" + std::to_string(q);
        return std::string();
    });

    S.run("isotropic lines: q+1 in dimension 3, q^2+1 in the anisotropic dimension 4", [&] {
        if (count_isotropic_subspaces(FiniteQuadSpace{3, 3, 0, 1}, 1) != 4) return std::string("m=3");
        if (count_isotropic_subspaces(FiniteQuadSpace{3, 4, 0, -1}, 1) != 10) return std::string("m=4");
        return std::string();
    });

    S.run("overlattices of invariants (1,1,1)", [&] {
        for (long p : primes) {
            auto ctx = PrimeCtx::make(p);
            for (int mask = 0; mask < 8; ++mask) {
                auto L = diag_form(ctx, {1, 1, 1}, {mask & 1 ? -1 : 1, mask & 2 ? -1 : 1, mask & 4 ? -1 : 1});
                int t3 = 0, t1 = 0, other = 0;
                for (auto& e : enumerate_integral_overlattices(L)) (e.t == 3 ? t3 : e.t == 1 ? t1 : other)++;
                if (t3 != 1 || t1 != p + 1 || other != 0) return "p=" + std::to_string(p) + " mask " + std::to_string(mask);
            }
        }
        return std::string();
    });

    S.run("weight factors for t = 0 and t = 1", [&] {
        for (long q : primes)
            for (int eps : {1, -1}) {
                if (weight_poly(q, 0, 1, eps) != Poly({Q(1)})) return std::string("t=0 polynomial");
                if (weight_factor(q, 0, 1, eps) != 0) return std::string("t=0 factor");
                if (weight_poly(q, 1, 1, eps) != Poly({Q(1), Q(eps)})) return std::string("t=1 polynomial");
                if (weight_factor(q, 1, 1, eps) != -eps) return std::string("t=1 factor");
            }
        return std::string();
    });

    S.run("normalizer equals the density of self-dual lattices", [&] {
        auto ctx = PrimeCtx::make(3);
        for (auto [n, m] : {std::pair{1, 2}, {1, 4}, {2, 3}})
            for (int eps : {1, -1}) {
                int k = (m - n - 1) / 2;
                auto r = density_oracle(self_dual(m, eps, ctx), self_dual(n, eps, ctx));
                Q want = nor_poly(n, eps, 3).eval(qpow(3, -k));
                if (r.density != want)
                    return "(n,m)=(" + std::to_string(n) + "," + std::to_string(m) + ") " + expect_eq(r.density, want);
            }
        return std::string();
    });

    S.run("Siegel series of invariants (1,1,1)", [&] {
        for (long q : primes) {
            auto ctx = PrimeCtx::make(q);
            auto L = diag_form(ctx, {1, 1, 1}, {1, 1, 1});
            for (int eps : {1, -1}) {
                Poly want({Q(1), Q(eps * q), Q(q), Q(eps)});
                if (den_poly(L, eps) != want) return "q=" + std::to_string(q) + " eps=" + std::to_string(eps);
            }
        }
        return std::string();
    });

    S.run("central derivative 3 - q and its weighted sum", [&] {
        for (long q : primes) {
            auto L = diag_form(PrimeCtx::make(q), {1, 1, 1}, {1, 1, 1});
            if (auto w = expect_eq(pden(L, -1), Q(3 - q)); !w.empty()) return "pden q=" + std::to_string(q) + ": " + w;
            if (auto w = expect_eq(pden_weight_sum(L, -1), Q(2 * (1 - q) + (q + 1))); !w.empty())
                return "weight sum q=" + std::to_string(q) + ": " + w;
        }
        return std::string();
    });

    S.run("co-isotropic even corank series vanishes at 1", [&] {
        int seen = 0;
        for (long p : {3L, 5L}) {
            auto ctx = PrimeCtx::make(p);
            for (int eps : {1, -1})
                for (auto& L : coisotropic_examples(ctx, eps)) {
                    ++seen;
                    if (den_flat_at_1(L, eps) != 0) return emit_lattice(L);
                }
        }
        return seen ? std::string() : std::string("no examples");
    });

    S.run("sign -1 inside the Hasse -1 space", [&] {
        for (long p : primes) {
            auto ctx = PrimeCtx::make(p);
            for (int n = 1; n <= 3; ++n)
                for (int eps : {1, -1}) {
                    if (n == 1 && eps == 1) continue;  // the split plane has Hasse +1
                    auto A = ambient_space(n + 1, eps, -1, ctx);
                    std::vector<Q> d;
                    for (int i = 0; i < n; ++i) d.push_back(A.gram[i][i] * p * p);
                    if (fe_sign(diag_lattice(ctx, d), eps) != -1) return "p=" + std::to_string(p) + " n=" + std::to_string(n);
                }
        }
        return std::string();
    });

    S.run("functional equation for (1,1,1)", [&] {
        auto L = diag_form(PrimeCtx::make(3), {1, 1, 1}, {1, 1, 1});
        if (fe_sign(L, -1) != -1) return std::string("sign");
        auto R = check_functional_equation(L, -1);
        return R.ok ? std::string() : R.first_failure();
    });

    S.run("Whittaker value at k = 0 vanishes in the Hasse -1 space", [&] {
        auto ctx = PrimeCtx::make(3);
        for (int eps : {1, -1}) {
            auto A = ambient_space(4, eps, -1, ctx);
            auto L = diag_lattice(ctx, {A.gram[0][0] * 9, A.gram[1][1] * 9, A.gram[2][2]});
            if (whittaker_value(L, eps, 0) != 0) return "eps=" + std::to_string(eps);
        }
        return std::string();
    });

    S.run("no horizontal overlattices when co-isotropic", [&] {
        auto ctx = PrimeCtx::make(3);
        for (int eps : {1, -1})
            for (auto& L : coisotropic_examples(ctx, eps))
                if (!hor_set(L, eps).empty()) return emit_lattice(L);
        return std::string();
    });

    S.run("quasi-canonical degrees", [&] {
        for (long q : primes) {
            if (quasi_canonical_degree(0, false, q) != 1) return std::string("s=0");
            if (quasi_canonical_degree(1, false, q) != q + 1) return std::string("s=1");
            if (quasi_canonical_degree(2, true, q) != 2 * q * q) return std::string("s=2 ramified");
        }
        return std::string();
    });

    S.run("primitive degrees", [&] {
        for (long q : primes) {
            auto ctx = PrimeCtx::make(q);
            for (int eps : {1, -1}) {
                if (primitive_degree(self_dual(2, eps, ctx), eps) != 1) return std::string("self-dual");
                if (primitive_degree(diag_lattice(ctx, {Q(1), Q(q * q)}), eps) != q + 1) return std::string("t=1 val=2");
            }
        }
        return std::string();
    });

    S.run("intersection number 3 - q and cancellation", [&] {
        for (long q : primes) {
            auto ctx = PrimeCtx::make(q);
            auto L = diag_form(ctx, {1, 1, 1}, {1, 1, 1});
            auto I = intersection_number(L, -1);
            if (I.realizable && I.value != 3 - q) return "q=" + std::to_string(q) + ": " + to_string(I.value);
            for (int e : {1, -1}) {
                auto R = cancellation_check(diag_form(ctx, {1, 2}, {1, -1}), self_dual(2, e, ctx), -1);
                if (!R.ok) return R.first_failure();
            }
        }
        return std::string();
    });

    S.run("vertex intersection values", [&] {
        auto ctx = PrimeCtx::make(3);
        auto V = make_vertex_lattice(4, -1, 1, ctx);
        if (int_V_Lambda(V, Vec(4, Q(0))) != -2) return std::string("x = 0");
        Vec xd(4, Q(0));
        xd[0] = Q(1) / 3;
        if (vp(dot_form(V.lattice.gram, xd, xd), 3) == 0 && int_V_Lambda(V, xd) != 1) return std::string("dual unit norm");
        Vec far(4, Q(0));
        far[0] = Q(1) / 9;
        if (int_V_Lambda(V, far) != 0) return std::string("outside the dual");
        if (isotropic_subspaces(V.W, 1, 3).size() != 10) return std::string("q^2+1 lines");
        return std::string();
    });

    S.run("Fourier transform of the vertex combination", [&] {
        auto V = make_vertex_lattice(4, -1, 1, PrimeCtx::make(3));
        auto f = int_V_Lambda_combo(V);
        return combos_equal(fourier(f), scale(f, QSqrt(-1))) ? std::string() : std::string("not an eigenfunction");
    });

    S.run("local modularity", [&] {
        auto ctx = PrimeCtx::make(3);
        for (auto [m, eps, d] : {std::tuple{4, -1, 1}, {6, -1, 2}}) {
            auto R = check_local_modularity(make_vertex_lattice(m, eps, d, ctx));
            if (!R.ok) return "m=" + std::to_string(m) + ": " + R.first_failure();
        }
        return std::string();
    });

    S.run("counting base cases", [&] {
        for (long q : {3L, 5L}) {
            auto ctx = PrimeCtx::make(q);
            for (int t : {3, 5}) {
                if (q == 5 && t == 5) continue;
                auto mu = mu_profile(diag_form(ctx, std::vector<int>(t, 1), std::vector<int>(t, 1)));
                if (mu.plus != 1 || mu.zero != 0 || mu.minus != zpow(q, t - 1) - 1) return "odd vertex t=" + std::to_string(t);
                for (int s : {1, -1})
                    if (counting_odd_value(mu, t, s, q) != 0) return std::string("odd vertex identity");
                std::vector<int> a(t, 1), u(t, 1);
                a[t - 1] = 2;
                auto L = diag_form(ctx, a, u);
                std::vector<int> a0(t - 1, 1), u0(t - 1, 1);
                int s = invariants(diag_form(ctx, a0, u0)).chi;
                auto m2 = mu_profile(L);
                if (m2.zero != q - 1 || m2.zero_s(s) != q - 1 || m2.zero_s(-s) != 0) return std::string("odd (1,...,1,2)");
                if (!check_counting_odd(L, 1).ok) return std::string("odd (1,...,1,2) identity");
            }
            for (int t : {2, 4}) {
                std::vector<int> a(t, 1), u(t, 1);
                a[t - 1] = 2;
                auto L = diag_form(ctx, a, u);
                auto mu = mu_profile(L);
                if (mu.plus != 1 || mu.zero != q - 1 || mu.minus != zpow(q, t - 1) - q) return "even t=" + std::to_string(t);
                for (int s : {1, -1})
                    if (!check_counting_even(L, s).ok) return std::string("even identity");
            }
        }
        return std::string();
    });

    S.run("perpendicular jump: zero when co-anisotropic, constant when co-isotropic", [&] {
        for (long p : {3L, 5L}) {
            auto ctx = PrimeCtx::make(p);
            for (int eps : {1, -1})
                for (auto& L : {diag_form(ctx, {1}, {1}), diag_form(ctx, {1}, {-1}), diag_form(ctx, {1, 1}, {1, 1}),
                                diag_form(ctx, {1, 1}, {1, -1})}) {
                    std::vector<Q> W;
                    try {
                        W = complement_plane(L, eps);
                    } catch (const Error&) {
                        continue;
                    }
                    bool coiso = invariants(L).chi == eps;
                    QSqrt first;
                    bool have = false;
                    for (int k = 1; k <= 3; ++k)
                        for (auto& w : W) {
                            Q nn = w * qpow(p, 2 * k);
                            QSqrt v = pden_perp_jump(L, nn, eps);
                            if (!coiso && !v.is_zero()) return emit_lattice(L) + " norm " + to_string(nn);
                            if (coiso && have && v != first) return emit_lattice(L) + " not constant";
                            first = v;
                            have = true;
                        }
                }
        }
        return std::string();
    });

    S.run("pden of diag(3,3,3) with eps = -1", [&] {
        auto L = diag_lattice(PrimeCtx::make(3), {Q(3), Q(3), Q(3)});
        if (fe_sign(L, -1) != -1) return std::string("sign");
        return expect_eq(pden(L, -1), 0);
    });

    Json out;
    int passed = 0;
    Json failures = Json::array();
    for (auto& c : S.cases) {
        if (c["ok"].get<bool>())
            ++passed;
        else
            failures.push_back(c);
    }
    out["passed"] = passed;
    out["failed"] = static_cast<int>(S.cases.size()) - passed;
    out["cases"] = S.cases.size();
    out["failures"] = failures;
    out["names"] = Json::array();
    for (auto& c : S.cases) out["names"].push_back(c["name"]);
    return out;
}

}  // namespace cli
