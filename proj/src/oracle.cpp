#include "siegel/oracle.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "siegel/overlattice.hpp"

namespace siegel {

namespace {

using u128 = unsigned __int128;

Z to_z(u128 v) {
    Z r = 0;
    Z base = 1;
    while (v) {
        r += base * static_cast<unsigned long>(static_cast<std::uint64_t>(v % 1000000000u));
        base *= 1000000000u;
        v /= 1000000000u;
    }
    return r;
}

// Symmetric n x n matrices over Z/mod, entries (i <= j) packed as base-mod digits.
struct SymSpace {
    int n;
    i64 mod;
    int e;
    i64 states;
    std::vector<std::pair<int, int>> pos;
    std::vector<i64> pw;

    SymSpace(int n_, i64 mod_) : n(n_), mod(mod_), e(n_ * (n_ + 1) / 2) {
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) pos.push_back({i, j});
        states = 1;
        for (int k = 0; k < e; ++k) {
            pw.push_back(states);
            states *= mod;
        }
    }

    i64 index_of(const std::vector<std::vector<i64>>& S) const {
        i64 idx = 0;
        for (int k = 0; k < e; ++k) idx += posmod(S[pos[k].first][pos[k].second], mod) * pw[k];
        return idx;
    }
};

struct RowKernel {
    std::vector<i64> idx;
    std::vector<std::vector<i64>> digits;
    std::vector<std::uint64_t> mult;
};

// Distribution of g * x x^t over x in (Z/mod)^n.
RowKernel row_kernel(const SymSpace& sp, i64 g) {
    std::map<i64, std::uint64_t> acc;
    std::vector<i64> x(sp.n, 0);
    while (true) {
        i64 idx = 0;
        for (int k = 0; k < sp.e; ++k) {
            auto [i, j] = sp.pos[k];
            i64 v = mulmod(mulmod(g, x[i], sp.mod), x[j], sp.mod);
            idx += v * sp.pw[k];
        }
        ++acc[idx];
        int c = 0;
        while (c < sp.n && ++x[c] == sp.mod) x[c++] = 0;
        if (c == sp.n) break;
    }
    RowKernel K;
    for (auto& [i, m] : acc) {
        K.idx.push_back(i);
        std::vector<i64> d(sp.e);
        for (int k = 0; k < sp.e; ++k) d[k] = (i / sp.pw[k]) % sp.mod;
        K.digits.push_back(std::move(d));
        K.mult.push_back(m);
    }
    return K;
}

double estimate_work(const SymSpace& sp, int m) {
    double xs = std::pow(static_cast<double>(sp.mod), sp.n);
    double supp = std::min(xs, static_cast<double>(sp.states));
    return 2 * xs + static_cast<double>(sp.states) * supp * sp.e * std::max(0, m - 1);
}

// Full distribution of sum_r g_r x_r x_r^t over all X in Mat_{m x n}(Z/mod).
std::vector<u128> row_distribution(const SymSpace& sp, const std::vector<i64>& gs) {
    std::vector<u128> f(sp.states, 0);
    f[0] = 1;
    std::map<i64, RowKernel> kernels;
    std::vector<i64> s(sp.e);
    for (i64 g : gs) {
        auto it = kernels.find(g);
        if (it == kernels.end()) it = kernels.emplace(g, row_kernel(sp, g)).first;
        const RowKernel& K = it->second;
        std::vector<u128> nf(sp.states, 0);
        for (i64 S = 0; S < sp.states; ++S) {
            if (f[S] == 0) continue;
            for (int k = 0; k < sp.e; ++k) s[k] = (S / sp.pw[k]) % sp.mod;
            for (size_t a = 0; a < K.idx.size(); ++a) {
                i64 idx = 0;
                const auto& d = K.digits[a];
                for (int k = 0; k < sp.e; ++k) {
                    i64 v = s[k] + d[k];
                    if (v >= sp.mod) v -= sp.mod;
                    idx += v * sp.pw[k];
                }
                nf[idx] += f[S] * K.mult[a];
            }
        }
        f.swap(nf);
    }
    return f;
}

std::vector<i64> unit_diagonal_mod(const QuadLattice& M, i64 mod) {
    if (!is_integral(M)) throw Error("NotIntegral", "target lattice must be integral");
    auto D = diagonalize_full(M);
    std::vector<i64> gs;
    for (auto& d : D.d) gs.push_back(mod_rational(d, mod));
    return gs;
}

// --- injective counts over F_p ---

std::mutex table_mu;
std::map<std::tuple<long, std::vector<i64>, int>, std::vector<u128>> table_cache;

const std::vector<u128>& all_counts_mod_p(const std::vector<i64>& g, int n, long p) {
    std::lock_guard<std::mutex> lock(table_mu);
    auto key = std::make_tuple(p, g, n);
    auto it = table_cache.find(key);
    if (it != table_cache.end()) return it->second;
    SymSpace sp(n, p);
    if (estimate_work(sp, static_cast<int>(g.size()) + 1) > 5e9)
        throw Error("BudgetExceeded", "mod-p row table too large");
    return table_cache.emplace(key, row_distribution(sp, g)).first->second;
}

using FM = std::vector<std::vector<i64>>;

// Null space of T over F_p, as row vectors.
std::vector<std::vector<i64>> radical_basis(const FM& T, long p) {
    int n = static_cast<int>(T.size());
    FM A = T;
    for (auto& r : A)
        for (auto& v : r) v = posmod(v, p);
    std::vector<int> pivcol;
    int row = 0;
    for (int c = 0; c < n && row < n; ++c) {
        int piv = -1;
        for (int r = row; r < n; ++r)
            if (A[r][c]) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(A[row], A[piv]);
        i64 inv = invmod(A[row][c], p);
        for (auto& v : A[row]) v = mulmod(v, inv, p);
        for (int r = 0; r < n; ++r)
            if (r != row && A[r][c]) {
                i64 f = A[r][c];
                for (int k = 0; k < n; ++k) A[r][k] = posmod(A[r][k] - f * A[row][k], p);
            }
        pivcol.push_back(c);
        ++row;
    }
    std::vector<std::vector<i64>> basis;
    std::vector<bool> is_piv(n, false);
    for (int c : pivcol) is_piv[c] = true;
    for (int fcol = 0; fcol < n; ++fcol) {
        if (is_piv[fcol]) continue;
        std::vector<i64> v(n, 0);
        v[fcol] = 1;
        for (size_t r = 0; r < pivcol.size(); ++r) v[pivcol[r]] = posmod(-A[r][fcol], p);
        basis.push_back(v);
    }
    return basis;
}

int rank_mod_p(std::vector<std::vector<i64>> A, long p) {
    int rows = static_cast<int>(A.size());
    if (rows == 0) return 0;
    int cols = static_cast<int>(A[0].size());
    int rank = 0;
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

// All subspaces of F_p^t, each as a list of coefficient rows in reduced echelon form.
void echelon_subspaces(int t, long p, std::vector<std::vector<std::vector<i64>>>& out) {
    for (int mask = 0; mask < (1 << t); ++mask) {
        std::vector<int> piv;
        for (int c = 0; c < t; ++c)
            if (mask >> c & 1) piv.push_back(c);
        int k = static_cast<int>(piv.size());
        // free slots: row r, column c > piv[r], c not a pivot
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
}

}  // namespace

int rep_dimension(int m, int n) { return n * (2 * m - n - 1) / 2; }

Z count_representations(const QuadLattice& M, const QuadLattice& L, int N, double budget) {
    if (!(M.ctx == L.ctx)) throw Error("CtxMismatch", "lattices over different primes");
    if (N < 1) throw Error("BadArgument", "N must be positive");
    long p = L.ctx.p;
    int m = M.rank(), n = L.rank();
    if (!is_integral(L)) return 0;
    if (n == 0) return 1;
    double bits = static_cast<double>(n) * m * N * std::log2(static_cast<double>(p));
    if (bits > 120) throw Error("BudgetExceeded", "count would overflow 128 bits");
    i64 mod = ipow64(p, N);
    SymSpace sp(n, mod);
    if (sp.states > 20000000 || estimate_work(sp, m) > budget)
        throw Error("BudgetExceeded", "literal count needs too much work at N=" + std::to_string(N));
    auto gs = unit_diagonal_mod(M, mod);
    auto f = row_distribution(sp, gs);
    std::vector<std::vector<i64>> T(n, std::vector<i64>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) T[i][j] = mod_rational(L.gram[i][j], mod);
    return to_z(f[sp.index_of(T)]);
}

Z count_injective_mod_p(const std::vector<i64>& g, const FM& T0, long p) {
    int n = static_cast<int>(T0.size());
    FM T = T0;
    for (auto& r : T)
        for (auto& v : r) v = posmod(v, p);
    std::vector<i64> gp;
    for (i64 v : g) {
        if (posmod(v, p) == 0) throw Error("Degenerate", "target form must be nondegenerate mod p");
        gp.push_back(posmod(v, p));
    }
    auto rad = radical_basis(T, p);
    int t = static_cast<int>(rad.size());
    std::vector<std::vector<std::vector<i64>>> subs;
    echelon_subspaces(t, p, subs);
    Z total = 0;
    for (const auto& coeffs : subs) {
        int k = static_cast<int>(coeffs.size());
        std::vector<std::vector<i64>> span;
        for (const auto& c : coeffs) {
            std::vector<i64> v(n, 0);
            for (int a = 0; a < t; ++a)
                for (int i = 0; i < n; ++i) v[i] = posmod(v[i] + c[a] * rad[a][i], p);
            span.push_back(v);
        }
        // complete the span with standard vectors
        std::vector<std::vector<i64>> comp;
        for (int i = 0; i < n && static_cast<int>(span.size()) < n; ++i) {
            std::vector<i64> e(n, 0);
            e[i] = 1;
            auto trial = span;
            trial.push_back(e);
            if (rank_mod_p(trial, p) == static_cast<int>(trial.size())) {
                span.push_back(e);
                comp.push_back(e);
            }
        }
        int nq = n - k;
        FM Tq(nq, std::vector<i64>(nq, 0));
        for (int a = 0; a < nq; ++a)
            for (int b = 0; b < nq; ++b) {
                i64 s = 0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) s = posmod(s + comp[a][i] * T[i][j] % p * comp[b][j], p);
                Tq[a][b] = s;
            }
        Z A;
        if (nq == 0) {
            A = 1;
        } else {
            SymSpace sp(nq, p);
            A = to_z(all_counts_mod_p(gp, nq, p)[sp.index_of(Tq)]);
        }
        Z mu = zpow(p, static_cast<unsigned>(k * (k - 1) / 2));
        if (k % 2) mu = -mu;
        total += mu * A;
    }
    return total;
}

namespace {

OracleResult stratified(const QuadLattice& M, const QuadLattice& L) {
    auto inv = invariants(M);
    if (!is_integral(M) || inv.val != 0)
        throw Error("NotSelfDual", "stratified route needs a self-dual target");
    long p = L.ctx.p;
    int m = M.rank(), n = L.rank();
    OracleResult R;
    R.method = "stratified";
    R.stabilized = true;
    R.N_used = 1;
    if (!is_integral(L)) {
        R.density = 0;
        return R;
    }
    auto gs = unit_diagonal_mod(M, p);
    OverlatticeLimits lim;
    lim.force = true;
    Q total = 0;
    for (const auto& e : *cached_overlattices(L, lim)) {
        FM T(n, std::vector<i64>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) T[i][j] = mod_rational(e.gram[i][j], static_cast<i64>(p));
        total += qpow(p, (n + 1 - m) * e.ell) * Q(count_injective_mod_p(gs, T, p));
    }
    R.density = total * qpow(p, -rep_dimension(m, n));
    return R;
}

}  // namespace

OracleResult density_oracle(const QuadLattice& M, const QuadLattice& L, const OracleOptions& opt) {
    if (!(M.ctx == L.ctx)) throw Error("CtxMismatch", "lattices over different primes");
    if (opt.method == OracleMethod::Stratified) return stratified(M, L);
    long p = L.ctx.p;
    int m = M.rank(), n = L.rank();
    OracleResult R;
    R.method = "literal";
    if (!is_integral(L)) {
        R.density = 0;
        R.stabilized = true;
        return R;
    }
    int cap = opt.max_N > 0 ? opt.max_N : 2 * invariants(L).val + 3;
    int dim = rep_dimension(m, n);
    std::vector<Q> vals;
    for (int N = 1; N <= cap; ++N) {
        Z c;
        try {
            c = count_representations(M, L, N, opt.budget);
        } catch (const Error& e) {
            if (e.code() == "BudgetExceeded" && opt.method == OracleMethod::Auto) return stratified(M, L);
            throw;
        }
        R.raw_counts.push_back({N, c});
        vals.push_back(Q(c) * qpow(p, -N * dim));
        size_t s = vals.size();
        if (s >= 3 && vals[s - 1] == vals[s - 2] && vals[s - 2] == vals[s - 3]) {
            R.density = vals.back();
            R.N_used = N;
            R.stabilized = true;
            return R;
        }
    }
    std::string msg = "no stabilization up to N=" + std::to_string(cap) + "; counts:";
    for (auto& [N, c] : R.raw_counts) msg += " " + std::to_string(N) + ":" + c.get_str();
    throw Error("NotStabilized", msg);
}

}  // namespace siegel
