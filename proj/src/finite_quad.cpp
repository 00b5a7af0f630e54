#include "siegel/finite_quad.hpp"

#include <functional>

namespace siegel {

namespace {

i64 md(i64 a, long q) { return posmod(a, q); }

void guard(long q, int m, bool force) {
    if (force) return;
    if (q > 5 || m > 4) throw Error("BudgetExceeded", "brute force limited to q <= 5, m <= 4");
}

Q qp(long q, int e) { return qpow(q, e); }

Z as_integer(const Q& x, const char* what) {
    Q c = x;
    c.canonicalize();
    if (c.get_den() != 1) throw Error("NotIntegral", std::string(what) + " evaluated to a non-integer");
    return c.get_num();
}

}  // namespace

FiniteQuadSpace finite_space_of(const FMat& gram0, long q) {
    int m = static_cast<int>(gram0.size());
    FMat G = gram0;
    for (auto& row : G)
        for (auto& x : row) x = md(x, q);
    auto add_col = [&](int dst, int src, i64 f) {
        for (int j = 0; j < m; ++j) G[dst][j] = md(G[dst][j] + f * G[src][j], q);
        for (int i = 0; i < m; ++i) G[i][dst] = md(G[i][dst] + f * G[i][src], q);
    };
    std::vector<bool> used(m, false);
    i64 det = 1;
    int rank = 0;
    while (true) {
        int piv = -1;
        for (int i = 0; i < m && piv < 0; ++i)
            if (!used[i] && G[i][i] != 0) piv = i;
        if (piv < 0) {
            int bi = -1, bj = -1;
            for (int i = 0; i < m && bi < 0; ++i)
                for (int j = i + 1; j < m; ++j)
                    if (!used[i] && !used[j] && G[i][j] != 0) {
                        bi = i;
                        bj = j;
                        break;
                    }
            if (bi < 0) break;
            add_col(bi, bj, 1);
            piv = bi;
        }
        used[piv] = true;
        ++rank;
        det = md(det * G[piv][piv], q);
        i64 inv = invmod(G[piv][piv], q);
        for (int j = 0; j < m; ++j) {
            if (used[j] || G[piv][j] == 0) continue;
            add_col(j, piv, md(-G[piv][j] * inv, q));
        }
    }
    FiniteQuadSpace U;
    U.q = q;
    U.m = m;
    U.t = m - rank;
    i64 disc = ((rank * (rank - 1) / 2) % 2 == 0) ? det : md(-det, q);
    U.chi0 = rank == 0 ? 1 : legendre(disc, q);
    return U;
}

FiniteQuadSpace reduce_mod_p(const QuadLattice& L) {
    if (!is_integral(L)) throw Error("NotIntegral", "reduction needs an integral lattice");
    long p = L.ctx.p;
    FMat G(L.rank(), std::vector<i64>(L.rank()));
    for (int i = 0; i < L.rank(); ++i)
        for (int j = 0; j < L.rank(); ++j) G[i][j] = mod_rational(L.gram[i][j], static_cast<i64>(p));
    return finite_space_of(G, p);
}

FMat finite_gram(const FiniteQuadSpace& U) {
    FMat G(U.m, std::vector<i64>(U.m, 0));
    int d = U.dim0();
    for (int i = 0; i < d; ++i) G[i][i] = 1;
    if (d > 0) {
        int base = ((d * (d - 1) / 2) % 2 == 0) ? 1 : legendre(static_cast<i64>(-1), U.q);
        if (base != U.chi0) {
            for (i64 r = 2; r < U.q; ++r)
                if (legendre(r, U.q) == -1) {
                    G[d - 1][d - 1] = r;
                    break;
                }
        }
    }
    return G;
}

int sgn_m(const FiniteQuadSpace& U, int m) {
    int d = U.dim0();
    return ((d - m) % 2 == 0) ? U.chi0 : 0;
}

Z order_orthogonal(const FiniteQuadSpace& V) {
    if (V.t != 0) throw Error("DegenerateSpace", "orthogonal group of a degenerate space");
    long q = V.q;
    int m = V.m;
    int s = sgn_even(V);
    Q half = (m % 2 == 0) ? qp(q, -m / 2) : Q(0);
    Q v = 2 * qp(q, m * (m - 1) / 2) / (1 + s * half);
    for (int i = 1; 2 * i <= m; ++i) v *= (1 - qp(q, -2 * i));
    return as_integer(v, "order_orthogonal");
}

Z count_isometries(const FiniteQuadSpace& U, const FiniteQuadSpace& V) {
    if (V.t != 0) throw Error("DegenerateTarget", "target space must be non-degenerate");
    if (U.m > V.m) return 0;
    if (U.m == 0) return 1;
    long q = V.q;
    int n = U.m, t = U.t, m = V.m;
    int sv = sgn_even(V);
    Q v = qp(q, n * (2 * m - n - 1) / 2);
    if (m % 2 == 0) v *= (1 - sv * qp(q, -m / 2));
    int su = sgn_m(U, m);
    if (su != 0) v *= (1 + V.chi0 * su * qp(q, -(m - n - t) / 2));
    for (int i = -m - n; 2 * i < m; ++i)
        if (2 * i > m - n - t) v *= (1 - qp(q, -2 * i));
    return as_integer(v, "count_isometries");
}

Z order_gl(long q, int b) {
    Z v = 1;
    for (int i = 0; i < b; ++i) v *= zpow(q, b) - zpow(q, i);
    return v;
}

Z count_isotropic_subspaces(const FiniteQuadSpace& V, int b) {
    if (V.t != 0) throw Error("DegenerateSpace", "isotropic subspaces of a degenerate space");
    int m = V.m;
    if (b < 0 || 2 * b > m) throw Error("BadDimension", "need 0 <= b <= m/2");
    if (b == 0) return 1;
    long q = V.q;
    Q num = 1, den = 1;
    for (int i = 1; i <= b; ++i) den *= (qp(q, i) - 1);
    if (m % 2 == 0) {
        int c = V.chi0;
        num = (qp(q, m / 2) - c) * (qp(q, m / 2 - b) + c);
        for (int i = 1; i <= b - 1; ++i) num *= (qp(q, m - 2 * i) - 1);
    } else {
        for (int i = 0; i <= b - 1; ++i) num *= (qp(q, m - 1 - 2 * i) - 1);
    }
    return as_integer(num / den, "count_isotropic_subspaces");
}

Z count_isotropic_vectors(const FiniteQuadSpace& V) {
    if (V.m < 2) return 1;
    return (V.q - 1) * count_isotropic_subspaces(V, 1) + 1;
}

namespace brute {

namespace {

i64 form(const FMat& G, const std::vector<i64>& x, const std::vector<i64>& y, long q) {
    i64 s = 0;
    size_t m = x.size();
    for (size_t i = 0; i < m; ++i) {
        if (x[i] == 0) continue;
        i64 row = 0;
        for (size_t j = 0; j < m; ++j) row += G[i][j] * y[j];
        s += x[i] * (row % q);
    }
    return md(s, q);
}

// Adds v to an echelon basis; false when v is dependent.
bool extend_basis(std::vector<std::vector<i64>>& basis, std::vector<int>& pivots, std::vector<i64> v, long q) {
    for (size_t k = 0; k < basis.size(); ++k) {
        i64 c = v[pivots[k]];
        if (c == 0) continue;
        for (size_t j = 0; j < v.size(); ++j) v[j] = md(v[j] - c * basis[k][j], q);
    }
    int piv = -1;
    for (size_t j = 0; j < v.size(); ++j)
        if (v[j] != 0) {
            piv = static_cast<int>(j);
            break;
        }
    if (piv < 0) return false;
    i64 inv = invmod(v[piv], q);
    for (auto& x : v) x = md(x * inv, q);
    for (size_t k = 0; k < basis.size(); ++k) {
        i64 c = basis[k][piv];
        if (c == 0) continue;
        for (size_t j = 0; j < v.size(); ++j) basis[k][j] = md(basis[k][j] - c * v[j], q);
    }
    basis.push_back(v);
    pivots.push_back(piv);
    return true;
}

}  // namespace

Z count_embeddings(const FMat& U, const FMat& V, long q, bool force) {
    int n = static_cast<int>(U.size()), m = static_cast<int>(V.size());
    guard(q, m, force);
    if (n > m) return 0;
    i64 total = 1;
    for (int i = 0; i < m; ++i) total *= q;
    std::vector<std::vector<i64>> all(total, std::vector<i64>(m));
    for (i64 c = 0; c < total; ++c) {
        i64 x = c;
        for (int i = 0; i < m; ++i) {
            all[c][i] = x % q;
            x /= q;
        }
    }
    std::vector<int> chosen;
    Z count = 0;
    std::function<void(int, std::vector<std::vector<i64>>, std::vector<int>)> rec =
        [&](int j, std::vector<std::vector<i64>> basis, std::vector<int> piv) {
            if (j == n) {
                ++count;
                return;
            }
            for (i64 c = 0; c < total; ++c) {
                const auto& x = all[c];
                if (form(V, x, x, q) != md(U[j][j], q)) continue;
                bool ok = true;
                for (int i = 0; i < j && ok; ++i)
                    if (form(V, all[chosen[i]], x, q) != md(U[i][j], q)) ok = false;
                if (!ok) continue;
                auto b2 = basis;
                auto p2 = piv;
                if (!extend_basis(b2, p2, x, q)) continue;
                chosen.push_back(static_cast<int>(c));
                rec(j + 1, std::move(b2), std::move(p2));
                chosen.pop_back();
            }
        };
    rec(0, {}, {});
    return count;
}

Z order_orthogonal(const FMat& V, long q, bool force) { return count_embeddings(V, V, q, force); }

Z count_isotropic_subspaces(const FMat& V, int b, long q, bool force) {
    int m = static_cast<int>(V.size());
    guard(q, m, force);
    if (b == 0) return 1;
    Z count = 0;
    // enumerate reduced row echelon b x m matrices
    std::vector<int> piv(b);
    std::function<void(int, int)> choose = [&](int k, int from) {
        if (k == b) {
            std::vector<std::pair<int, int>> free_pos;
            for (int r = 0; r < b; ++r)
                for (int c = piv[r] + 1; c < m; ++c) {
                    bool is_piv = false;
                    for (int rr = 0; rr < b; ++rr)
                        if (piv[rr] == c) is_piv = true;
                    if (!is_piv) free_pos.push_back({r, c});
                }
            i64 combos = 1;
            for (size_t i = 0; i < free_pos.size(); ++i) combos *= q;
            for (i64 c = 0; c < combos; ++c) {
                std::vector<std::vector<i64>> rows(b, std::vector<i64>(m, 0));
                for (int r = 0; r < b; ++r) rows[r][piv[r]] = 1;
                i64 x = c;
                for (auto [r, col] : free_pos) {
                    rows[r][col] = x % q;
                    x /= q;
                }
                bool iso = true;
                for (int i = 0; i < b && iso; ++i)
                    for (int j = i; j < b && iso; ++j)
                        if (form(V, rows[i], rows[j], q) != 0) iso = false;
                if (iso) ++count;
            }
            return;
        }
        for (int c = from; c < m; ++c) {
            piv[k] = c;
            choose(k + 1, c + 1);
        }
    };
    choose(0, 0);
    return count;
}

Z count_isotropic_vectors(const FMat& V, long q, bool force) {
    int m = static_cast<int>(V.size());
    guard(q, m, force);
    i64 total = 1;
    for (int i = 0; i < m; ++i) total *= q;
    Z count = 0;
    std::vector<i64> x(m);
    for (i64 c = 0; c < total; ++c) {
        i64 y = c;
        for (int i = 0; i < m; ++i) {
            x[i] = y % q;
            y /= q;
        }
        if (form(V, x, x, q) == 0) ++count;
    }
    return count;
}

}  // namespace brute

}  // namespace siegel
