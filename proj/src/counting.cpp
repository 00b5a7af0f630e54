#include "siegel/counting.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace siegel {

namespace {

struct Shape {
    int t = 0;
    std::vector<int> a;
    std::vector<Q> d;  // diagonal norms
    Mat T;             // diagonal basis in original coordinates
};

Shape shape_of(const QuadLattice& L) {
    if (L.rank() < 2) throw Error("WrongShape", "rank must exceed 1");
    if (!is_integral(L)) throw Error("WrongShape", "lattice must be integral");
    Shape S;
    S.t = L.rank();
    auto D = diagonalize_full(L);
    S.d = D.d;
    S.T = D.T;
    for (auto& x : S.d) {
        int v = vp(x, L.ctx.p);
        if (v < 1) throw Error("WrongShape", "type must equal rank");
        S.a.push_back(v);
    }
    return S;
}

i64 ipow(long p, int e) { return e <= 0 ? 1 : ipow64(p, e); }

// Distribution of sum_i lambda_i^2 u_i p^(A - a_i) mod `mod`, lambda_i in [0, p^(a_i + shift)).
std::vector<Z> norm_distribution(const Shape& S, long p, int A, int shift, i64 mod) {
    std::vector<Z> dist(mod, Z(0));
    dist[0] = 1;
    for (int i = 0; i < S.t; ++i) {
        i64 range = ipow(p, S.a[i] + shift);
        i64 coef = mulmod(mod_rational(unit_part(S.d[i], p), mod), ipow(p, A - S.a[i]) % mod, mod);
        std::map<i64, i64> hist;
        for (i64 l = 0; l < range; ++l) hist[mulmod(mulmod(l % mod, l % mod, mod), coef, mod)]++;
        std::vector<Z> next(mod, Z(0));
        for (i64 s = 0; s < mod; ++s) {
            if (dist[s] == 0) continue;
            for (auto& [r, c] : hist) next[(s + r) % mod] += dist[s] * c;
        }
        dist.swap(next);
    }
    return dist;
}

// Class of the determinant factor relating chi(<x>) to chi(<x>^perp) for val(x) = 0.
int perp_factor(const QuadLattice& L) {
    int t = L.rank();
    Q det = determinant(L.gram);
    if (((t - 1) * (t - 2) / 2) % 2 == 1) det = -det;
    return unit_class(det, L.ctx.p);
}

}  // namespace

MuProfile mu_profile(const QuadLattice& L) {
    Shape S = shape_of(L);
    long p = L.ctx.p;
    int A = *std::max_element(S.a.begin(), S.a.end());
    int chiL = invariants(L).chi;
    int kappa = chiL == 0 ? 1 : perp_factor(L);
    MuProfile mu;
    mu.plus = mu.zero = mu.minus = mu.zero_plus = mu.zero_minus = 0;

    // p L^dual: (x, x) = p^(2 - A) N
    if (A <= 1) {
        mu.plus = 1;
    } else {
        i64 mod = ipow(p, A - 1), low = ipow(p, A - 2);
        auto dist = norm_distribution(S, p, A, -1, mod);
        for (i64 s = 0; s < mod; ++s) {
            if (dist[s] == 0 || s % low != 0) continue;
            if (s == 0) {
                mu.plus += dist[s];
                continue;
            }
            mu.zero += dist[s];
            int c = legendre((s / low) % p, p) * kappa;
            (c == 1 ? mu.zero_plus : mu.zero_minus) += dist[s];
        }
    }
    // L^dual: (x, x) = p^-A N
    i64 mod = ipow(p, A);
    auto dist = norm_distribution(S, p, A, 0, mod);
    mu.minus = dist[0] - mu.plus - mu.zero;
    return mu;
}

namespace brute {

MuProfile mu_profile(const QuadLattice& L) {
    Shape S = shape_of(L);
    long p = L.ctx.p;
    int t = S.t;
    int chiL = invariants(L).chi;
    MuProfile mu;
    mu.plus = mu.zero = mu.minus = mu.zero_plus = mu.zero_minus = 0;
    auto scan = [&](int shift, auto&& visit) {
        std::vector<i64> lam(t, 0), range(t);
        for (int i = 0; i < t; ++i) range[i] = ipow(p, S.a[i] + shift);
        while (true) {
            Vec x(t, Q(0));
            for (int i = 0; i < t; ++i) {
                Q c = Q(lam[i]) * qpow(p, -S.a[i] - shift);
                for (int r = 0; r < t; ++r) x[r] += c * S.T[r][i];
            }
            visit(x);
            int i = 0;
            while (i < t && ++lam[i] == range[i]) lam[i++] = 0;
            if (i == t) break;
        }
    };
    auto val = [&](const Q& nn) { return nn == 0 ? 1 << 20 : vp(nn, p); };
    Z inner = 0, outer = 0;
    scan(-1, [&](const Vec& x) {
        Q nn = dot_form(L.gram, x, x);
        int v = val(nn);
        if (v < 0) return;
        ++inner;
        if (v >= 1) {
            ++mu.plus;
            return;
        }
        ++mu.zero;
        int c;
        if (chiL == 0) {
            c = unit_class(nn, p);
        } else {
            auto perp = orthogonal_complement(L.gram, {x});
            Mat B(t, Vec(perp.size()));
            for (size_t j = 0; j < perp.size(); ++j)
                for (int r = 0; r < t; ++r) B[r][j] = perp[j][r];
            c = invariants(make_lattice(L.ctx, matmul(transpose(B), matmul(L.gram, B)))).chi;
        }
        (c == 1 ? mu.zero_plus : mu.zero_minus) += 1;
    });
    scan(0, [&](const Vec& x) {
        if (val(dot_form(L.gram, x, x)) >= 0) ++outer;
    });
    mu.minus = outer - inner;
    return mu;
}

}  // namespace brute

Q counting_odd_value(const MuProfile& mu, int t, int s, long q) {
    Q h = qpow(q, (t - 1) / 2);
    return (1 - qpow(q, t - 1)) * Q(mu.plus) + (1 - s * h) * Q(mu.zero_plus) + (1 + s * h) * Q(mu.zero_minus) +
           Q(mu.minus);
}

Q counting_even_value(const MuProfile& mu, int t, int s, long q) {
    Q h = qpow(q, t / 2), g = qpow(q, t / 2 - 1);
    return (1 - s * h) * (1 + s * g) * Q(mu.plus) + (1 + s * g) * Q(mu.zero) + Q(mu.minus);
}

bool counting_odd_admissible(const QuadLattice& L, int s) {
    auto I = invariants(L);
    if (L.rank() < 3 || L.rank() % 2 == 0 || I.type != L.rank() || (s != 1 && s != -1)) return false;
    return I.chi == 0 || s == 1;
}

bool counting_even_admissible(const QuadLattice& L, int s) {
    auto I = invariants(L);
    if (L.rank() < 2 || L.rank() % 2 == 1 || I.type != L.rank() || (s != 1 && s != -1)) return false;
    return I.chi == 0 || I.chi == s;
}

namespace {

Report counting_report(const char* name, const QuadLattice& L, int s, bool odd) {
    if (!(odd ? counting_odd_admissible(L, s) : counting_even_admissible(L, s)))
        throw Error("InadmissiblePair", std::string(name) + ": (L, s) outside the hypotheses");
    Report R;
    R.name = name;
    auto mu = mu_profile(L);
    long q = L.ctx.p;
    int t = L.rank();
    Q v = odd ? counting_odd_value(mu, t, s, q) : counting_even_value(mu, t, s, q);
    R.note("mu_plus", mu.plus.get_str());
    R.note("mu_zero", mu.zero.get_str());
    R.note("mu_minus", mu.minus.get_str());
    R.note("mu_zero_plus", mu.zero_plus.get_str());
    R.note("mu_zero_minus", mu.zero_minus.get_str());
    R.note("value", to_string(v));
    if (v != 0) R.fail("weighted count is " + to_string(v) + " for s = " + std::to_string(s));
    return R;
}

// M = L + <y / p> in the diagonal basis of L.
std::optional<QuadLattice> extend_by(const Shape& S, const PrimeCtx& ctx, const std::vector<i64>& y) {
    int t = S.t;
    Mat gens(t, Vec(t + 1, Q(0)));
    for (int i = 0; i < t; ++i) {
        gens[i][i] = 1;
        gens[i][t] = Q(y[i]) / ctx.p;
    }
    Mat B = lattice_hnf(gens, ctx.p);
    Mat D(t, Vec(t, Q(0)));
    for (int i = 0; i < t; ++i) D[i][i] = S.d[i];
    Mat G = matmul(transpose(B), matmul(D, B));
    QuadLattice M = make_lattice(ctx, G);
    if (!is_integral(M) || invariants(M).type != t) return std::nullopt;
    return M;
}

}  // namespace

Report check_counting_odd(const QuadLattice& L, int s) { return counting_report("counting odd", L, s, true); }
Report check_counting_even(const QuadLattice& L, int s) { return counting_report("counting even", L, s, false); }

std::optional<Companion> companion_lattice(const QuadLattice& L) {
    Shape S = shape_of(L);
    long p = L.ctx.p;
    int t = S.t;
    int top = static_cast<int>(std::max_element(S.a.begin(), S.a.end()) - S.a.begin());
    if (S.a[top] >= 3) {
        std::vector<i64> y(t, 0);
        y[top] = 1;
        if (auto M = extend_by(S, L.ctx, y)) return Companion{*M, "top"};
        return std::nullopt;
    }
    std::vector<int> twos;
    for (int i = 0; i < t; ++i)
        if (S.a[i] == 2) twos.push_back(i);
    if (twos.size() < 2) return std::nullopt;
    // isotropic vector of the unit form on the scale-p^2 block
    int k = static_cast<int>(twos.size());
    std::vector<i64> u(k);
    for (int j = 0; j < k; ++j) u[j] = mod_rational(unit_part(S.d[twos[j]], p), static_cast<i64>(p));
    i64 total = ipow(p, k);
    for (i64 code = 1; code < total; ++code) {
        std::vector<i64> c(k);
        i64 r = code, nn = 0;
        for (int j = 0; j < k; ++j) {
            c[j] = r % p;
            r /= p;
            nn = (nn + c[j] * c[j] % p * u[j]) % p;
        }
        if (nn != 0) continue;
        std::vector<i64> y(t, 0);
        for (int j = 0; j < k; ++j) y[twos[j]] = c[j];
        if (auto M = extend_by(S, L.ctx, y)) return Companion{*M, "plane"};
    }
    return std::nullopt;
}

std::vector<QuadLattice> index_q_type_t_overlattices(const QuadLattice& L) {
    Shape S = shape_of(L);
    long p = L.ctx.p;
    int t = S.t;
    std::vector<QuadLattice> out;
    i64 total = ipow(p, t);
    for (i64 code = 1; code < total; ++code) {
        std::vector<i64> y(t);
        i64 r = code;
        int lead = -1;
        for (int j = 0; j < t; ++j) {
            y[j] = r % p;
            r /= p;
            if (lead < 0 && y[j] != 0) lead = j;
        }
        if (y[lead] != 1) continue;  // one representative per line
        if (auto M = extend_by(S, L.ctx, y)) out.push_back(*M);
    }
    return out;
}

MuDiff mu_difference(const MuProfile& L, const MuProfile& M, long q) {
    return {L.plus - q * M.plus, L.zero - q * M.zero, L.minus - q * M.minus, L.zero_plus - q * M.zero_plus,
            L.zero_minus - q * M.zero_minus};
}

Z perp_jump_inner(const QuadLattice& Lfprime, const Q& x_norm, int eps) {
    const PrimeCtx& ctx = Lfprime.ctx;
    long p = ctx.p;
    int r = Lfprime.rank();
    int n = r + 1;
    auto D = diagonalize_full(Lfprime);
    std::vector<int> a(r);
    for (int i = 0; i < r; ++i) a[i] = std::max(0, vp(D.d[i], p));
    std::vector<i64> lam(r, 0), range(r);
    for (int i = 0; i < r; ++i) range[i] = ipow(p, a[i]);
    Z total = 0;
    while (true) {
        Vec cross(r);
        Q uu = 0;
        for (int i = 0; i < r; ++i) {
            Q c = Q(lam[i]) * qpow(p, -a[i]);
            cross[i] = c * D.d[i];
            uu += c * c * D.d[i];
        }
        if (uu == 0 || vp(uu, p) >= 0) {
            Mat G(n, Vec(n, Q(0)));
            for (int i = 0; i < r; ++i) {
                G[i][i] = D.d[i];
                G[i][r] = G[r][i] = cross[i];
            }
            G[r][r] = uu + x_norm;
            QuadLattice Lp = make_lattice(ctx, G);
            auto U = reduce_mod_p(Lp);
            total += weight_factor(p, U.t, sgn_m(U, n + 1), eps);
        }
        int i = 0;
        while (i < r && ++lam[i] == range[i]) lam[i++] = 0;
        if (i == r) break;
    }
    return total;
}

QSqrt pden_perp_jump(const QuadLattice& Lflat, const Q& x_norm, int eps, const OverlatticeLimits& lim) {
    long p = Lflat.ctx.p;
    if (!is_integral(Lflat)) throw Error("PreconditionViolated", "Lflat must be integral");
    if (x_norm == 0 || vp(x_norm, p) < 1) throw Error("PreconditionViolated", "x must be anisotropic with val >= 1");
    int k = Lflat.rank();
    QSqrt total;
    for (const auto& e : *cached_overlattices(Lflat, lim)) {
        if (e.t <= 1 || (e.t == 2 && eps * e.sgn(k) == 1)) continue;
        Z inner = perp_jump_inner(make_lattice(Lflat.ctx, e.gram), x_norm, eps);
        if (inner != 0) total = add(total, mul(half_power(p, -e.val), QSqrt(Q(inner)), p));
    }
    return total;
}

Report mu_translation_invariance(int trials, const PrimeCtx& ctx, unsigned long long seed) {
    Report R;
    R.name = "coset classification is translation invariant";
    std::mt19937_64 rng(seed);
    long p = ctx.p;
    auto cls = [&](const Q& nn, int level) {
        // level 1: val >= 0 only; level 2: val >= 1, val = 0 with its class
        if (nn == 0) return 2;
        int v = vp(nn, p);
        if (v < 0) return 0;
        if (level == 1) return 1;
        return v >= 1 ? 2 : 10 + unit_class(nn, p);
    };
    for (int trial = 0; trial < trials; ++trial) {
        int t = 2 + static_cast<int>(rng() % 2);
        std::vector<Q> d(t);
        std::vector<int> a(t);
        for (int i = 0; i < t; ++i) {
            a[i] = 1 + static_cast<int>(rng() % 4);
            d[i] = Q(rng() % 2 ? 1 : ctx.r) * qpow(p, a[i]);
        }
        QuadLattice L = diag_lattice(ctx, d);
        bool scaled = rng() % 2;  // p L^dual or L^dual
        Vec x(t), y(t);
        for (int i = 0; i < t; ++i) {
            int e = scaled ? 1 - a[i] : -a[i];
            x[i] = Q(static_cast<long>(rng() % 50)) * qpow(p, e);
            y[i] = Q(static_cast<long>(rng() % 50) - 25);
        }
        Vec xy(t);
        for (int i = 0; i < t; ++i) xy[i] = x[i] + y[i];
        int level = scaled ? 2 : 1;
        int c1 = cls(dot_form(L.gram, x, x), level), c2 = cls(dot_form(L.gram, xy, xy), level);
        if (c1 != c2) R.fail("trial " + std::to_string(trial) + ": class changed under translation");
    }
    R.note("trials", std::to_string(trials));
    return R;
}

}  // namespace siegel
