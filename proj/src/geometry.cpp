#include "siegel/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace siegel {

namespace {

Q qp(long q, int e) { return qpow(q, e); }

Z as_integer(const Q& v, const char* what) {
    if (v.get_den() != 1) throw Error("NotIntegral", std::string(what) + " is not an integer: " + to_string(v));
    return v.get_num();
}

int min_val(const Mat& A, long p) {
    int best = 1 << 29;
    for (auto& r : A)
        for (auto& x : r)
            if (x != 0) best = std::min(best, vp(x, p));
    return best;
}

// Canonical representative of r modulo p^v Z_(p).
Q canon_mod(const Q& r, int v, long p) {
    if (r == 0) return 0;
    int w = vp(r, p);
    if (w >= v) return 0;
    int k = std::max(0, -w);
    Q s = r * qp(p, k);
    Z M = zpow(p, static_cast<unsigned>(v + k));
    Z rep = mod_rational(s, M);
    return Q(rep) / zpow(p, static_cast<unsigned>(k));
}

std::string mat_key(const Mat& H) {
    std::string s;
    for (auto& r : H) {
        for (auto& x : r) {
            s += x.get_str();
            s += ',';
        }
        s += ';';
    }
    return s;
}

Mat gram_of(const Mat& G, const Mat& B) { return matmul(transpose(B), matmul(G, B)); }

// Subspaces of F_p^t of dimension k, as RREF row lists.
std::vector<std::vector<std::vector<i64>>> subspaces_of_dim(int t, int k, long p) {
    std::vector<std::vector<std::vector<i64>>> out;
    for (int mask = 0; mask < (1 << t); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        std::vector<int> piv;
        for (int c = 0; c < t; ++c)
            if (mask >> c & 1) piv.push_back(c);
        std::vector<std::pair<int, int>> slots;
        for (int r = 0; r < k; ++r)
            for (int c = piv[r] + 1; c < t; ++c)
                if (!(mask >> c & 1)) slots.push_back({r, c});
        std::vector<i64> vals(slots.size(), 0);
        while (true) {
            std::vector<std::vector<i64>> rows(k, std::vector<i64>(t, 0));
            for (int r = 0; r < k; ++r) rows[r][piv[r]] = 1;
            for (size_t s = 0; s < slots.size(); ++s) rows[slots[s].first][slots[s].second] = vals[s];
            out.push_back(rows);
            size_t c = 0;
            while (c < vals.size() && ++vals[c] == p) vals[c++] = 0;
            if (c == vals.size()) break;
        }
    }
    return out;
}

i64 bform(const FMat& W, const std::vector<i64>& x, const std::vector<i64>& y, long p) {
    i64 s = 0;
    for (size_t i = 0; i < x.size(); ++i)
        for (size_t j = 0; j < y.size(); ++j) s = (s + x[i] * W[i][j] % p * y[j]) % p;
    return posmod(s, p);
}

int rank_fp(std::vector<std::vector<i64>> A, long p) {
    int rows = static_cast<int>(A.size());
    if (!rows) return 0;
    int cols = static_cast<int>(A[0].size()), rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (posmod(A[r][c], p)) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(A[rank], A[piv]);
        i64 inv = invmod(posmod(A[rank][c], p), p);
        for (int r = 0; r < rows; ++r)
            if (r != rank) {
                i64 f = mulmod(posmod(A[r][c], p), inv, p);
                for (int k = 0; k < cols; ++k) A[r][k] = posmod(A[r][k] - f * A[rank][k], p);
            }
        ++rank;
    }
    return rank;
}

bool contains_space(const std::vector<std::vector<i64>>& big, const std::vector<std::vector<i64>>& small, long p) {
    auto all = big;
    all.insert(all.end(), small.begin(), small.end());
    return rank_fp(all, p) == static_cast<int>(big.size());
}

int flat_rank_check(const QuadLattice& L, int n) {
    if (L.rank() != n - 1) throw Error("RankMismatch", "expected rank n-1 = " + std::to_string(n - 1));
    return n;
}

}  // namespace

int t_max(int m, int eps) {
    if (m % 2 == 1) return m - 1;
    return eps == 1 ? m - 2 : m;
}

bool embeds_in_space(const QuadLattice& L, int m, int eps, int hasse) {
    int c = m - L.rank();
    if (c < 0) return false;
    if (c >= 3) return true;
    if (c == 0) {
        auto inv = invariants(L);
        return inv.chi == eps && inv.hasse == hasse;
    }
    const PrimeCtx& ctx = L.ctx;
    std::vector<Q> choices = {Q(1), Q(ctx.r), Q(ctx.p), Q(ctx.r * ctx.p)};
    int total = 1;
    for (int i = 0; i < c; ++i) total *= 4;
    for (int code = 0; code < total; ++code) {
        std::vector<Q> d;
        int k = code;
        for (int i = 0; i < c; ++i) {
            d.push_back(choices[k % 4]);
            k /= 4;
        }
        auto inv = invariants(direct_sum(L, diag_lattice(ctx, d)));
        if (inv.chi == eps && inv.hasse == hasse) return true;
    }
    return false;
}

bool is_coisotropic(const QuadLattice& Lflat, int n, int eps) {
    flat_rank_check(Lflat, n);
    return invariants(Lflat).chi == eps;
}

bool is_horizontal(const QuadLattice& Mflat, int n, int eps) {
    flat_rank_check(Mflat, n);
    if (!is_integral(Mflat)) return false;
    auto inv = invariants(Mflat);
    if (inv.type <= 1) return true;
    if (inv.type != 2) return false;
    return eps * sgn_m(reduce_mod_p(Mflat), n - 1) == 1;
}

std::vector<OverlatticeEntry> hor_set(const QuadLattice& Lflat, int eps, const OverlatticeLimits& lim) {
    if (!is_integral(Lflat)) throw Error("NotIntegral", "hor_set needs an integral lattice");
    int k = Lflat.rank();
    std::vector<OverlatticeEntry> out;
    for (const auto& e : *cached_overlattices(Lflat, lim))
        if (e.t <= 1 || (e.t == 2 && eps * e.sgn(k) == 1)) out.push_back(e);
    return out;
}

Z quasi_canonical_degree(int s, bool ramified, long q) {
    if (s < 0) throw Error("BadArgument", "s must be nonnegative");
    if (!ramified) return s == 0 ? Z(1) : Z(zpow(q, s) + zpow(q, s - 1));
    return s == 0 ? Z(2) : Z(2 * zpow(q, s));
}

Z primitive_degree(const QuadLattice& Mflat, int eps) {
    int n = Mflat.rank() + 1;
    if (!is_horizontal(Mflat, n, eps)) throw Error("NotHorizontal", "primitive degree of a non-horizontal lattice");
    auto inv = invariants(Mflat);
    long q = Mflat.ctx.p;
    Q base = qp(q, inv.val / 2);
    Q v;
    if (inv.chi != 0) {
        if (inv.type == 0)
            v = base;
        else if (inv.type == 1)
            v = base * (1 + Q(1) / q);
        else
            v = 2 * base * (1 + Q(1) / q);
    } else {
        v = 2 * base * (inv.type == 1 ? 1 : 2);
    }
    return as_integer(v, "primitive degree");
}

Z horizontal_degree(const QuadLattice& Lflat, int eps, const OverlatticeLimits& lim) {
    Z total = 0;
    for (const auto& e : hor_set(Lflat, eps, lim)) total += primitive_degree(make_lattice(Lflat.ctx, e.gram), eps);
    return total;
}

IntersectionResult intersection_number(const QuadLattice& L, int eps, const OverlatticeLimits& lim) {
    IntersectionResult R;
    R.realizable = embeds_in_space(L, L.rank() + 1, eps, -1);
    R.value = R.realizable ? pden(L, eps, lim) : Q(0);
    return R;
}

// ---- Q(sqrt q) ----

std::string QSqrt::str() const {
    if (b == 0) return to_string(a);
    return to_string(a) + (b < 0 ? "-" : "+") + to_string(abs(b)) + "*sqrt(q)";
}

QSqrt add(const QSqrt& x, const QSqrt& y) { return QSqrt(x.a + y.a, x.b + y.b); }

QSqrt mul(const QSqrt& x, const QSqrt& y, long q) {
    return QSqrt(x.a * y.a + x.b * y.b * q, x.a * y.b + x.b * y.a);
}

QSqrt half_power(long q, int e) {
    if (e % 2 == 0) return QSqrt(qp(q, e / 2), 0);
    return QSqrt(0, qp(q, (e - 1) / 2));
}

// ---- lattices and indicator combinations ----

Mat lattice_hnf(const Mat& gens, long p) {
    int m = static_cast<int>(gens.size());
    int k = m ? static_cast<int>(gens[0].size()) : 0;
    std::vector<Vec> cols(k, Vec(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) cols[j][i] = gens[i][j];
    std::vector<int> diag(m);
    for (int i = 0; i < m; ++i) {
        int best = -1, bv = 0;
        for (int j = i; j < k; ++j)
            if (cols[j][i] != 0) {
                int v = vp(cols[j][i], p);
                if (best < 0 || v < bv) {
                    best = j;
                    bv = v;
                }
            }
        if (best < 0) throw Error("NotFullRank", "generators do not span a full-rank lattice");
        std::swap(cols[i], cols[best]);
        Q scale = qp(p, bv) / cols[i][i];
        for (auto& x : cols[i]) x *= scale;
        diag[i] = bv;
        for (int j = i + 1; j < k; ++j) {
            if (cols[j][i] == 0) continue;
            Q f = cols[j][i] / cols[i][i];
            for (int r = 0; r < m; ++r) cols[j][r] -= f * cols[i][r];
        }
    }
    for (int row = 0; row < m; ++row)
        for (int i = 0; i < row; ++i) {
            Q r = cols[i][row];
            Q rep = canon_mod(r, diag[row], p);
            if (r == rep) continue;
            Q f = (r - rep) / cols[row][row];
            for (int s = row; s < m; ++s) cols[i][s] -= f * cols[row][s];
        }
    Mat H(m, Vec(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) H[i][j] = cols[j][i];
    return H;
}

void IndicatorCombo::add(const Mat& basis, const QSqrt& c) {
    if (c.is_zero()) return;
    Mat H = lattice_hnf(basis, ambient.ctx.p);
    std::string key = mat_key(H);
    for (size_t i = 0; i < terms.size(); ++i)
        if (terms[i].key == key) {
            terms[i].coef = siegel::add(terms[i].coef, c);
            if (terms[i].coef.is_zero()) terms.erase(terms.begin() + static_cast<long>(i));
            return;
        }
    terms.push_back({key, H, c});
}

QSqrt IndicatorCombo::eval(const Vec& x) const {
    QSqrt s;
    long p = ambient.ctx.p;
    for (const auto& t : terms) {
        Mat inv = inverse(t.basis);
        bool in = true;
        for (auto& row : inv) {
            Q c = 0;
            for (size_t j = 0; j < x.size(); ++j) c += row[j] * x[j];
            if (c != 0 && vp(c, p) < 0) {
                in = false;
                break;
            }
        }
        if (in) s = siegel::add(s, t.coef);
    }
    return s;
}

IndicatorCombo scale(const IndicatorCombo& c, const QSqrt& s) {
    IndicatorCombo out{c.ambient, {}};
    for (const auto& t : c.terms) out.add(t.basis, mul(t.coef, s, c.ambient.ctx.p));
    return out;
}

IndicatorCombo combo_sum(const IndicatorCombo& a, const IndicatorCombo& b) {
    IndicatorCombo out = a;
    for (const auto& t : b.terms) out.add(t.basis, t.coef);
    return out;
}

IndicatorCombo fourier(const IndicatorCombo& c) {
    long q = c.ambient.ctx.p;
    IndicatorCombo out{c.ambient, {}};
    for (const auto& t : c.terms) {
        Mat g = gram_of(c.ambient.gram, t.basis);
        int v = vp(determinant(g), q);
        Mat dualb = matmul(t.basis, inverse(g));
        out.add(dualb, mul(t.coef, half_power(q, -v), q));
    }
    return out;
}

ComboDiff compare_combos(const IndicatorCombo& a, const IndicatorCombo& b, double max_points) {
    long p = a.ambient.ctx.p;
    int m = a.ambient.rank();
    std::vector<const IndicatorTerm*> all;
    for (auto& t : a.terms) all.push_back(&t);
    for (auto& t : b.terms) all.push_back(&t);
    int lo = 0, hi = 0;
    std::vector<Mat> invs;
    for (auto* t : all) {
        invs.push_back(inverse(t->basis));
        lo = std::max(lo, -min_val(invs.back(), p));
        hi = std::max(hi, -min_val(t->basis, p));
    }
    int N = lo + hi;
    ComboDiff D;
    double pts = std::pow(static_cast<double>(p), static_cast<double>(N) * m);
    if (pts > max_points) throw Error("BudgetExceeded", "coset grid too large");
    struct Member {
        int D;
        i64 mod;
        std::vector<std::vector<i64>> C;
    };
    std::vector<Member> mem;
    for (auto& inv : invs) {
        Mat C = inv;
        for (auto& r : C)
            for (auto& x : r) x *= qp(p, -hi);
        int Dv = std::max(0, -min_val(C, p));
        Member M{Dv, ipow64(p, Dv), {}};
        for (auto& r : C) {
            std::vector<i64> row;
            for (auto& x : r) row.push_back(Dv == 0 ? 0 : mod_rational(x * qp(p, Dv), M.mod));
            M.C.push_back(row);
        }
        mem.push_back(std::move(M));
    }
    size_t na = a.terms.size();
    i64 mod = ipow64(p, N);
    std::vector<i64> y(m, 0);
    while (true) {
        ++D.points;
        QSqrt va, vb;
        for (size_t k = 0; k < all.size(); ++k) {
            const Member& M = mem[k];
            bool in = true;
            if (M.D > 0)
                for (auto& row : M.C) {
                    i64 s = 0;
                    for (int j = 0; j < m; ++j) s = (s + mulmod(row[j], posmod(y[j], M.mod), M.mod)) % M.mod;
                    if (s != 0) {
                        in = false;
                        break;
                    }
                }
            if (!in) continue;
            if (k < na)
                va = add(va, all[k]->coef);
            else
                vb = add(vb, all[k]->coef);
        }
        if (va != vb) {
            D.equal = false;
            for (int j = 0; j < m; ++j) D.witness.push_back(Q(y[j]) * qp(p, -hi));
            D.left = va;
            D.right = vb;
            return D;
        }
        int c = 0;
        while (c < m && ++y[c] == mod) y[c++] = 0;
        if (c == m) break;
    }
    return D;
}

bool combos_equal(const IndicatorCombo& a, const IndicatorCombo& b) { return compare_combos(a, b).equal; }

// ---- vertex lattices ----

FiniteQuadSpace VertexLatticeCtx::w_space() const { return finite_space_of(W, lattice.ctx.p); }

int VertexLatticeCtx::chi_W() const {
    long p = lattice.ctx.p;
    int t = static_cast<int>(W.size());
    i64 det = (t / 2) % 2 ? p - 1 : 1;
    for (int i = 0; i < t; ++i) det = mulmod(det, posmod(W[i][i], p), p);
    return legendre(det, p);
}

std::vector<VertexLatticeCtx> vertex_lattices(int m, int eps, int d, const PrimeCtx& ctx) {
    int t = 2 * d + 2;
    std::vector<VertexLatticeCtx> out;
    if (t > m) return out;
    std::map<std::pair<int, int>, bool> seen;
    for (int mask = 0; mask < (1 << m); ++mask) {
        int cw = 1, cu = 1;
        std::vector<Q> diag;
        for (int i = 0; i < m; ++i) {
            bool nonres = mask >> i & 1;
            Q u = nonres ? Q(ctx.r) : Q(1);
            if (nonres) (i < t ? cw : cu) *= -1;
            diag.push_back(i < t ? u * ctx.p : u);
        }
        if (!seen.emplace(std::make_pair(cw, cu), true).second) continue;
        QuadLattice L = diag_lattice(ctx, diag);
        auto inv = invariants(L);
        if (inv.chi != eps || inv.hasse != -1) continue;
        VertexLatticeCtx V;
        V.lattice = L;
        V.d = d;
        V.m = m;
        V.eps = eps;
        V.W.assign(t, std::vector<i64>(t, 0));
        for (int i = 0; i < t; ++i) V.W[i][i] = (mask >> i & 1) ? ctx.r : 1;
        out.push_back(std::move(V));
    }
    return out;
}

VertexLatticeCtx make_vertex_lattice(int m, int eps, int d, const PrimeCtx& ctx) {
    if (d < 1 || 2 * d + 2 > t_max(m, eps))
        throw Error("WrongType", "no vertex lattice of type " + std::to_string(2 * d + 2) + " in this space");
    auto all = vertex_lattices(m, eps, d, ctx);
    if (all.empty()) throw Error("WrongType", "no vertex lattice found");
    return all.front();
}

std::vector<std::vector<std::vector<i64>>> isotropic_subspaces(const FMat& W, int dim, long p) {
    int t = static_cast<int>(W.size());
    std::vector<std::vector<std::vector<i64>>> out;
    for (auto& U : subspaces_of_dim(t, dim, p)) {
        bool iso = true;
        for (int i = 0; i < dim && iso; ++i)
            for (int j = i; j < dim && iso; ++j)
                if (bform(W, U[i], U[j], p) != 0) iso = false;
        if (iso) out.push_back(U);
    }
    return out;
}

Mat lattice_over(const VertexLatticeCtx& V, const std::vector<std::vector<i64>>& U) {
    int m = V.lattice.rank();
    long p = V.lattice.ctx.p;
    Mat gens = identity(m);
    for (auto& u : U)
        for (int i = 0; i < m; ++i) gens[i].push_back(i < static_cast<int>(u.size()) ? Q(u[i]) / p : Q(0));
    return lattice_hnf(gens, p);
}

namespace {

// 0: in Lambda, 1: in Lambda^dual minus Lambda with integral norm, 2: otherwise
int classify(const VertexLatticeCtx& V, const Vec& x) {
    long p = V.lattice.ctx.p;
    int t = static_cast<int>(V.W.size());
    bool in_L = true, in_dual = true;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        int v = vp(x[i], p);
        if (v < 0) in_L = false;
        if (v < (static_cast<int>(i) < t ? -1 : 0)) in_dual = false;
    }
    if (in_L) return 0;
    if (!in_dual) return 2;
    Q n = dot_form(V.lattice.gram, x, x);
    if (n != 0 && vp(n, p) < 0) return 2;
    return 1;
}

}  // namespace

Q c_const(int d, long q) {
    Q c = 1;
    for (int i = 1; i <= d - 1; ++i) c *= 1 - qp(q, i);
    return c;
}

Q c_prime(int d, long q) {
    Q c = 1;
    for (int i = 2; i <= d; ++i) c *= 1 + qp(q, i + 1);
    return c;
}

Q int_V_Lambda(const VertexLatticeCtx& V, const Vec& x) {
    if (V.d != 1) throw Error("WrongType", "Int_V(Lambda) needs a type-4 vertex lattice");
    long q = V.lattice.ctx.p;
    switch (classify(V, x)) {
        case 0: return 1 - q;
        case 1: return 1;
        default: return 0;
    }
}

Q c_V_Lambda(const VertexLatticeCtx& V, const Vec& x) {
    long q = V.lattice.ctx.p;
    Q c = c_const(V.d, q);
    switch (classify(V, x)) {
        case 0: return c * (1 - qp(q, V.d));
        case 1: return c;
        default: return 0;
    }
}

IndicatorCombo int_V_Lambda_combo(const VertexLatticeCtx& V) {
    if (V.d != 1) throw Error("WrongType", "Int_V(Lambda) needs a type-4 vertex lattice");
    long q = V.lattice.ctx.p;
    IndicatorCombo C{V.lattice, {}};
    C.add(identity(V.lattice.rank()), QSqrt(-Q(q) * (1 + q)));
    for (auto& U : isotropic_subspaces(V.W, 1, q)) C.add(lattice_over(V, U), QSqrt(1));
    return C;
}

IndicatorCombo c_V_Lambda_combo(const VertexLatticeCtx& V) {
    long q = V.lattice.ctx.p;
    int d = V.d;
    auto lower = isotropic_subspaces(V.W, d - 1, q);
    auto upper = isotropic_subspaces(V.W, d, q);
    Q factor = c_const(d, q) / c_prime(d, q);
    IndicatorCombo C{V.lattice, {}};
    for (auto& U : lower) {
        // Int_V(Lambda_U) for the type-4 lattice Lambda_U = Lambda + U
        C.add(lattice_over(V, U), QSqrt(-factor * q * (1 + q)));
        for (auto& U2 : upper)
            if (contains_space(U2, U, q)) C.add(lattice_over(V, U2), QSqrt(factor));
    }
    return C;
}

Report check_local_modularity(const VertexLatticeCtx& V) {
    Report R;
    R.name = "local modularity";
    long q = V.lattice.ctx.p;
    int m = V.lattice.rank();
    int t = 2 * V.d + 2;
    if (t > t_max(m, V.eps)) R.fail("type exceeds t_max");
    auto inv = invariants(V.lattice);
    if (inv.hasse != -1 || inv.chi != V.eps) R.fail("lattice is not inside V_m^eps");
    R.note("chi_W", std::to_string(V.chi_W()));

    std::vector<std::pair<std::string, IndicatorCombo>> combos;
    if (V.d == 1) {
        auto lines = isotropic_subspaces(V.W, 1, q);
        R.note("type2_overlattices", std::to_string(lines.size()));
        if (V.chi_W() == -1 && Z(static_cast<long>(lines.size())) != Z(q * q + 1))
            R.fail("type-2 overlattice count " + std::to_string(lines.size()) + " != q^2+1");
        combos.push_back({"Int", int_V_Lambda_combo(V)});
    }
    combos.push_back({"c", c_V_Lambda_combo(V)});

    for (auto& [name, C] : combos) {
        R.note(name + "_terms", std::to_string(C.terms.size()));
        // pointwise table on cosets of Lambda in p^-1 Lambda
        std::vector<i64> y(m, 0);
        bool table_ok = true;
        while (table_ok) {
            Vec x(m);
            for (int j = 0; j < m; ++j) x[j] = Q(y[j]) / q;
            QSqrt got = C.eval(x);
            Q want = name == "Int" ? int_V_Lambda(V, x) : c_V_Lambda(V, x);
            if (got != QSqrt(want)) {
                table_ok = false;
                std::string w;
                for (auto& c : x) w += to_string(c) + " ";
                R.fail(name + " combo disagrees with the case table at " + w + ": " + got.str() + " vs " +
                       to_string(want));
            }
            int c = 0;
            while (c < m && ++y[c] == q) y[c++] = 0;
            if (c == m) break;
        }
        IndicatorCombo F = fourier(C);
        auto diff = compare_combos(F, scale(C, QSqrt(-1)));
        R.note(name + "_points", std::to_string(diff.points));
        if (!diff.equal) {
            std::string w;
            for (auto& c : diff.witness) w += to_string(c) + " ";
            R.fail(name + ": fourier != -combo at " + w + ": " + diff.left.str() + " vs " + diff.right.str());
        }
        if (!combos_equal(fourier(F), C)) R.fail(name + ": double transform is not the identity");
    }
    return R;
}

// ---- difference of central derivatives ----

std::vector<Q> complement_plane(const QuadLattice& Lflat, int eps) {
    const PrimeCtx& ctx = Lflat.ctx;
    std::vector<Q> choices = {Q(1), Q(ctx.r), Q(ctx.p), Q(ctx.r * ctx.p)};
    for (auto& w1 : choices)
        for (auto& w2 : choices) {
            auto iv = invariants(direct_sum(Lflat, diag_lattice(ctx, {w1, w2})));
            if (iv.chi == eps && iv.hasse == -1) return {w1, w2};
        }
    throw Error("PreconditionViolated", "Lflat does not embed into V_{n+1}^eps");
}

Report pden_difference_check(const QuadLattice& Lflat, int eps, const OverlatticeLimits& lim) {
    Report R;
    R.name = "pden difference";
    const PrimeCtx& ctx = Lflat.ctx;
    long q = ctx.p;
    auto inv = invariants(Lflat);
    if (!is_integral(Lflat)) throw Error("PreconditionViolated", "Lflat must be integral");
    if (inv.chi == eps) throw Error("PreconditionViolated", "Lflat is co-isotropic");
    auto a = fundamental_invariants(Lflat);
    int top = a.empty() ? 0 : a.back();

    std::vector<Q> W = complement_plane(Lflat, eps);

    Q flat = den_flat_at_1(Lflat, eps, lim);
    Q hsum = 0;
    for (const auto& e : hor_set(Lflat, eps, lim)) {
        Q base = qp(q, e.val / 2);
        if (inv.chi != 0)
            hsum += base * (e.t == 0 ? Q(1) : e.t == 1 ? Q(1 + Q(1) / q) : Q(2 * (1 + Q(1) / q)));
        else
            hsum += base * (e.t == 1 ? 1 : 2);
    }
    Q expect = inv.chi != 0 ? flat : 2 * flat;
    Q expect_hor = inv.chi != 0 ? hsum : 2 * hsum;
    Q hdeg = Q(horizontal_degree(Lflat, eps, lim));
    if (expect != expect_hor) R.fail("Den^flat(1) side " + to_string(expect) + " != horizontal sum " + to_string(expect_hor));
    if (hdeg != expect) R.fail("horizontal degree " + to_string(hdeg) + " != " + to_string(expect));
    R.note("expected", to_string(expect));

    for (auto& w : W) {
        int vw = vp(w, q);
        int k0 = 0;
        while (vw + 2 * k0 <= top) ++k0;
        for (int k = k0; k <= k0 + 1; ++k) {
            Q norm = w * qp(q, 2 * k);
            QuadLattice L = direct_sum(Lflat, diag_lattice(ctx, {norm}));
            QuadLattice Lt = direct_sum(Lflat, diag_lattice(ctx, {norm / (q * q)}));
            if (fe_sign(L, eps) != -1) R.fail("sign is not -1 for x norm " + to_string(norm));
            Q diff = pden(L, eps, lim) - pden(Lt, eps, lim);
            if (diff != expect)
                R.fail("x norm " + to_string(norm) + ": difference " + to_string(diff) + " != " + to_string(expect));
        }
    }
    return R;
}

Report saturated_horizontal_property(int trials, int m, int eps, const PrimeCtx& ctx, unsigned long long seed,
                                     SaturatedStats* stats) {
    Report R;
    R.name = "saturated horizontal";
    std::mt19937_64 rng(seed);
    long p = ctx.p;
    int n = m - 1;
    QuadLattice H = self_dual(m, eps, ctx);
    std::uniform_int_distribution<long> coord(-p * p, p * p);
    SaturatedStats S;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<Vec> span;
        for (int j = 0; j < n - 1; ++j) {
            Vec v(m);
            for (auto& c : v) c = coord(rng);
            span.push_back(v);
        }
        if (matrix_rank(span) != n - 1) continue;
        Mat G(n - 1, Vec(n - 1));
        for (int i = 0; i < n - 1; ++i)
            for (int j = 0; j < n - 1; ++j) G[i][j] = dot_form(H.gram, span[i], span[j]);
        if (determinant(G) == 0) continue;
        auto sub = restrict_to_sublattice(H, identity(m), span);
        ++S.tried;
        if (!embeds_in_space(sub.lattice, m, eps, -1)) continue;
        ++S.used;
        auto iv = invariants(sub.lattice);
        if (iv.type > 2) R.fail("type " + std::to_string(iv.type) + " saturated sublattice");
        else if (!is_horizontal(sub.lattice, n, eps)) R.fail("saturated sublattice is not horizontal");
    }
    R.note("tried", std::to_string(S.tried));
    R.note("used", std::to_string(S.used));
    if (stats) *stats = S;
    return R;
}

}  // namespace siegel
