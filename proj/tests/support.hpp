#pragma once

#include <random>
#include <set>
#include <vector>

#include "siegel/padic.hpp"

namespace testsupport {

using namespace siegel;

inline QuadLattice diag_form(const PrimeCtx& ctx, const std::vector<int>& a, const std::vector<int>& u) {
    std::vector<Q> d;
    for (size_t i = 0; i < a.size(); ++i) d.push_back(Q(u[i] > 0 ? 1 : ctx.r) * qpow(ctx.p, a[i]));
    return diag_lattice(ctx, d);
}

// Integer matrix with determinant +-1.
inline Mat random_unimodular(int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> c(-2, 2);
    Mat U = identity(n);
    for (int step = 0; step < 3 * n; ++step) {
        int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
        if (i == j) continue;
        int f = c(rng);
        for (int k = 0; k < n; ++k) U[k][i] += f * U[k][j];
    }
    return U;
}

inline QuadLattice scramble(const QuadLattice& L, std::mt19937_64& rng) {
    return base_change(L, random_unimodular(L.rank(), rng));
}

inline QuadLattice random_lattice(const PrimeCtx& ctx, int n, int max_a, std::mt19937_64& rng) {
    std::vector<int> a(n), u(n);
    for (int i = 0; i < n; ++i) {
        a[i] = static_cast<int>(rng() % (max_a + 1));
        u[i] = (rng() % 2) ? 1 : -1;
    }
    return scramble(diag_form(ctx, a, u), rng);
}

// One diagonal representative per isometry class with the given rank and valuation bound.
inline std::vector<QuadLattice> lattice_grid(const PrimeCtx& ctx, int n, int max_val) {
    std::vector<QuadLattice> out;
    std::set<std::vector<int>> seen;
    std::vector<int> a(n);
    auto rec = [&](auto&& self, int i, int from, int left) -> void {
        if (i == n) {
            for (int mask = 0; mask < (1 << n); ++mask) {
                std::vector<int> u(n);
                for (int k = 0; k < n; ++k) u[k] = (mask >> k & 1) ? -1 : 1;
                QuadLattice L = diag_form(ctx, a, u);
                JordanProfile J = jordan_profile(L);
                std::vector<int> key;
                for (auto& b : J.blocks) key.insert(key.end(), {b.scale, b.rank, b.unit_class});
                if (seen.insert(key).second) out.push_back(L);
            }
            return;
        }
        for (int v = from; v <= left; ++v) {
            a[i] = v;
            self(self, i + 1, v, left - v);
        }
    };
    rec(rec, 0, 0, max_val);
    return out;
}

}  // namespace testsupport
