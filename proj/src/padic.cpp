#include "siegel/padic.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace siegel {

PrimeCtx PrimeCtx::make(long p) {
    if (p < 3 || !is_prime(p)) throw Error("BadPrime", "p must be an odd prime, got " + std::to_string(p));
    PrimeCtx c;
    c.p = p;
    for (long r = 2; r < p; ++r)
        if (legendre(static_cast<i64>(r), p) == -1) {
            c.r = r;
            break;
        }
    return c;
}

QuadLattice make_lattice(const PrimeCtx& ctx, const Mat& gram) {
    int n = static_cast<int>(gram.size());
    if (n == 0) throw Error("BadShape", "empty Gram matrix");
    for (const auto& row : gram)
        if (static_cast<int>(row.size()) != n) throw Error("BadShape", "Gram matrix not square");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            if (gram[i][j] != gram[j][i]) throw Error("NotSymmetric", "Gram matrix not symmetric");
    if (determinant(gram) == 0) throw Error("SingularGram", "det = 0");
    QuadLattice L{ctx, gram};
    for (auto& row : L.gram)
        for (auto& x : row) x.canonicalize();
    return L;
}

QuadLattice diag_lattice(const PrimeCtx& ctx, const std::vector<Q>& d) {
    int n = static_cast<int>(d.size());
    Mat g(n, Vec(n, Q(0)));
    for (int i = 0; i < n; ++i) g[i][i] = d[i];
    return make_lattice(ctx, g);
}

Mat identity(int n) {
    Mat I(n, Vec(n, Q(0)));
    for (int i = 0; i < n; ++i) I[i][i] = 1;
    return I;
}

Mat transpose(const Mat& A) {
    if (A.empty()) return {};
    Mat T(A[0].size(), Vec(A.size()));
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t j = 0; j < A[0].size(); ++j) T[j][i] = A[i][j];
    return T;
}

Mat matmul(const Mat& A, const Mat& B) {
    size_t n = A.size(), k = B.size(), m = B.empty() ? 0 : B[0].size();
    Mat C(n, Vec(m, Q(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (A[i][l] == 0) continue;
            for (size_t j = 0; j < m; ++j) C[i][j] += A[i][l] * B[l][j];
        }
    return C;
}

Q determinant(const Mat& A0) {
    Mat A = A0;
    int n = static_cast<int>(A.size());
    Q det = 1;
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (A[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return 0;
        if (piv != c) {
            std::swap(A[piv], A[c]);
            det = -det;
        }
        det *= A[c][c];
        for (int r = c + 1; r < n; ++r) {
            if (A[r][c] == 0) continue;
            Q f = A[r][c] / A[c][c];
            for (int j = c; j < n; ++j) A[r][j] -= f * A[c][j];
        }
    }
    return det;
}

Mat inverse(const Mat& A0) {
    int n = static_cast<int>(A0.size());
    Mat A = A0, I = identity(n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (A[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) throw Error("SingularGram", "matrix not invertible");
        std::swap(A[piv], A[c]);
        std::swap(I[piv], I[c]);
        Q inv = 1 / A[c][c];
        for (int j = 0; j < n; ++j) {
            A[c][j] *= inv;
            I[c][j] *= inv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || A[r][c] == 0) continue;
            Q f = A[r][c];
            for (int j = 0; j < n; ++j) {
                A[r][j] -= f * A[c][j];
                I[r][j] -= f * I[c][j];
            }
        }
    }
    return I;
}

namespace {

// Row echelon form in place; returns pivot columns.
std::vector<int> echelon(Mat& A) {
    std::vector<int> pivots;
    if (A.empty()) return pivots;
    int rows = static_cast<int>(A.size()), cols = static_cast<int>(A[0].size());
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (A[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(A[piv], A[r]);
        Q inv = 1 / A[r][c];
        for (int j = 0; j < cols; ++j) A[r][j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || A[i][c] == 0) continue;
            Q f = A[i][c];
            for (int j = 0; j < cols; ++j) A[i][j] -= f * A[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

int matrix_rank(const Mat& A0) {
    Mat A = A0;
    return static_cast<int>(echelon(A).size());
}

std::vector<Vec> kernel(const Mat& A0) {
    Mat A = A0;
    if (A.empty()) return {};
    int cols = static_cast<int>(A[0].size());
    auto pivots = echelon(A);
    std::vector<bool> is_piv(cols, false);
    for (int c : pivots) is_piv[c] = true;
    std::vector<Vec> out;
    for (int f = 0; f < cols; ++f) {
        if (is_piv[f]) continue;
        Vec v(cols, Q(0));
        v[f] = 1;
        for (size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -A[i][f];
        out.push_back(v);
    }
    return out;
}

Q dot_form(const Mat& G, const Vec& x, const Vec& y) {
    Q s = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        for (size_t j = 0; j < y.size(); ++j)
            if (y[j] != 0) s += x[i] * G[i][j] * y[j];
    }
    return s;
}

Diagonalization diagonalize_full(const QuadLattice& L) {
    long p = L.ctx.p;
    int n = L.rank();
    Mat G = L.gram;
    Mat T = identity(n);
    auto val = [&](const Q& x) { return x == 0 ? INT32_MAX : vp(x, p); };
    // Column operations on T mirror congruence operations on G.
    auto add_col = [&](int dst, int src, const Q& f) {
        for (int i = 0; i < n; ++i) T[i][dst] += f * T[i][src];
        for (int j = 0; j < n; ++j) G[dst][j] += f * G[src][j];
        for (int i = 0; i < n; ++i) G[i][dst] += f * G[i][src];
    };
    auto swap_col = [&](int a, int b) {
        if (a == b) return;
        for (int i = 0; i < n; ++i) std::swap(T[i][a], T[i][b]);
        std::swap(G[a], G[b]);
        for (int i = 0; i < n; ++i) std::swap(G[i][a], G[i][b]);
    };
    for (int k = 0; k < n; ++k) {
        int best = INT32_MAX, bi = -1, bj = -1;
        for (int i = k; i < n; ++i)
            for (int j = i; j < n; ++j) {
                int v = val(G[i][j]);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0 || best == INT32_MAX) throw Error("SingularGram", "degenerate form");
        // prefer any diagonal entry of minimal valuation, smallest row first
        int diag = -1;
        for (int i = k; i < n; ++i)
            if (val(G[i][i]) == best) {
                diag = i;
                break;
            }
        if (diag < 0) {
            add_col(bi, bj, Q(1));
            diag = bi;
        }
        swap_col(k, diag);
        for (int j = k + 1; j < n; ++j) {
            if (G[k][j] == 0) continue;
            Q f = -G[k][j] / G[k][k];
            add_col(j, k, f);
        }
    }
    Diagonalization D;
    D.T = T;
    for (int i = 0; i < n; ++i) D.d.push_back(G[i][i]);
    return D;
}

std::vector<DiagEntry> diagonalize(const QuadLattice& L) {
    auto D = diagonalize_full(L);
    std::vector<DiagEntry> out;
    for (const auto& d : D.d) out.push_back({vp(d, L.ctx.p), unit_class(d, L.ctx.p)});
    std::stable_sort(out.begin(), out.end(), [](const DiagEntry& x, const DiagEntry& y) { return x.a < y.a; });
    return out;
}

bool is_integral(const QuadLattice& L) {
    for (const auto& row : L.gram)
        for (const auto& x : row)
            if (x != 0 && vp(x, L.ctx.p) < 0) return false;
    return true;
}

std::vector<int> fundamental_invariants(const QuadLattice& L) {
    if (!is_integral(L)) throw Error("NotIntegral", "Gram matrix is not p-integral");
    std::vector<int> a;
    for (const auto& e : diagonalize(L)) a.push_back(e.a);
    return a;
}

int hilbert_symbol(const Q& a, const Q& b, const PrimeCtx& ctx) {
    if (a == 0 || b == 0) throw Error("ZeroArgument", "Hilbert symbol of zero");
    long p = ctx.p;
    int al = vp(a, p), be = vp(b, p);
    int s = 1;
    if ((static_cast<long>(al) * be) % 2 != 0 && ((p - 1) / 2) % 2 != 0) s = -s;
    if (be % 2 != 0) s *= unit_class(a, p);
    if (al % 2 != 0) s *= unit_class(b, p);
    return s;
}

Invariants invariants(const QuadLattice& L) {
    long p = L.ctx.p;
    int n = L.rank();
    auto D = diagonalize_full(L);
    Invariants I;
    I.det = 1;
    for (const auto& d : D.d) {
        I.det *= d;
        int a = vp(d, p);
        I.val += a;
        if (a > 0) ++I.type;
    }
    I.disc = ((n * (n - 1) / 2) % 2 == 0) ? I.det : Q(-I.det);
    I.det_class = unit_class(I.det, p);
    I.disc_class = unit_class(I.disc, p);
    I.chi = (I.val % 2 != 0) ? 0 : I.disc_class;
    I.hasse = 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) I.hasse *= hilbert_symbol(D.d[i], D.d[j], L.ctx);
    return I;
}

QuadLattice dual(const QuadLattice& L) { return make_lattice(L.ctx, inverse(L.gram)); }

QuadLattice direct_sum(const QuadLattice& A, const QuadLattice& B) {
    if (!(A.ctx == B.ctx)) throw Error("CtxMismatch", "lattices over different primes");
    int a = A.rank(), b = B.rank();
    Mat g(a + b, Vec(a + b, Q(0)));
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < a; ++j) g[i][j] = A.gram[i][j];
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j) g[a + i][a + j] = B.gram[i][j];
    return make_lattice(A.ctx, g);
}

QuadLattice rescale(const QuadLattice& L, int k) {
    QuadLattice R = L;
    Q f = qpow(L.ctx.p, k);
    for (auto& row : R.gram)
        for (auto& x : row) x *= f;
    return R;
}

QuadLattice base_change(const QuadLattice& L, const Mat& U) {
    return make_lattice(L.ctx, matmul(matmul(transpose(U), L.gram), U));
}

VertexInfo is_vertex(const QuadLattice& L) {
    auto a = fundamental_invariants(L);
    int t = 0;
    bool ok = true;
    for (int x : a) {
        if (x > 1) ok = false;
        if (x == 1) ++t;
    }
    return {ok, t};
}

QuadLattice ambient_space(int m, int eps, int hasse, const PrimeCtx& ctx) {
    if (m < 1) throw Error("Inadmissible", "dimension must be positive");
    if (m == 1 && hasse != 1) throw Error("Inadmissible", "a line has Hasse invariant +1");
    if (m == 2 && eps == 1 && hasse == -1) throw Error("Inadmissible", "disc = 1 forces Hasse +1 in dimension 2");
    if (m == 2 && eps == 1) return diag_lattice(ctx, {Q(1), Q(-1)});  // hyperbolic plane
    // entries (b, u) with b in {0,1}, u in {1, r}; lexicographic over sorted tuples
    std::vector<std::pair<int, int>> opts = {{0, 1}, {0, 0}, {1, 1}, {1, 0}};  // (b, u==1?)
    std::vector<int> idx(m, 0);
    std::vector<std::vector<int>> cands;
    std::function<void(int, int)> rec = [&](int pos, int from) {
        if (pos == m) {
            cands.push_back(idx);
            return;
        }
        for (int o = from; o < 4; ++o) {
            idx[pos] = o;
            rec(pos + 1, o);
        }
    };
    rec(0, 0);
    std::stable_sort(cands.begin(), cands.end(), [&](const auto& x, const auto& y) {
        int vx = 0, vy = 0;
        for (int o : x) vx += opts[o].first;
        for (int o : y) vy += opts[o].first;
        return vx < vy;
    });
    for (const auto& c : cands) {
        std::vector<Q> d;
        for (int o : c) d.push_back(Q(opts[o].second ? 1 : ctx.r) * qpow(ctx.p, opts[o].first));
        auto L = diag_lattice(ctx, d);
        auto I = invariants(L);
        if (I.chi == eps && I.hasse == hasse) return L;
    }
    throw Error("Inadmissible", "no quadratic space with the requested invariants");
}

QuadLattice self_dual(int m, int eps, const PrimeCtx& ctx) {
    std::vector<Q> d(m, Q(1));
    int sign = ((m * (m - 1) / 2) % 2 == 0) ? 1 : legendre(static_cast<i64>(-1), ctx.p);
    if (sign != eps) d[m - 1] = ctx.r;
    return diag_lattice(ctx, d);
}

std::vector<Vec> orthogonal_complement(const Mat& G, const std::vector<Vec>& sub) {
    if (sub.empty()) {
        std::vector<Vec> all;
        for (size_t i = 0; i < G.size(); ++i) {
            Vec e(G.size(), Q(0));
            e[i] = 1;
            all.push_back(e);
        }
        return all;
    }
    Mat S;
    for (const auto& v : sub) S.push_back(v);
    Mat gs;
    for (const auto& u : sub) {
        Vec row;
        for (const auto& v : sub) row.push_back(dot_form(G, u, v));
        gs.push_back(row);
    }
    if (determinant(gs) == 0) throw Error("DegenerateSubspace", "sub-basis spans a degenerate subspace");
    Mat A = matmul(S, G);
    return kernel(A);
}

JordanProfile jordan_profile(const QuadLattice& L) {
    JordanProfile J;
    J.ctx = L.ctx;
    for (const auto& e : diagonalize(L)) {
        if (!J.blocks.empty() && J.blocks.back().scale == e.a) {
            J.blocks.back().rank += 1;
            J.blocks.back().unit_class *= e.u;
        } else {
            J.blocks.push_back({e.a, 1, e.u});
        }
    }
    return J;
}

QuadLattice canonical_diagonal(const QuadLattice& L) {
    std::vector<Q> d;
    for (const auto& e : diagonalize(L)) d.push_back(Q(e.u == 1 ? 1 : L.ctx.r) * qpow(L.ctx.p, e.a));
    return diag_lattice(L.ctx, d);
}

}  // namespace siegel
