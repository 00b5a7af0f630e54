#include "siegel/overlattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <list>
#include <mutex>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace siegel {

namespace {

using IVec = std::vector<i64>;
using IMat = std::vector<IVec>;  // list of columns

struct Hermite {
    IMat cols;            // cols[i] has zeros above row i and p^{v[i]} on the diagonal
    std::vector<int> v;
};

int val_mod(i64 x, long p, int K) {
    if (x == 0) return K;
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

// Canonical lower-triangular basis of span(gens) + p^K Z_p^n.
Hermite hermite_zp(IMat gens, int n, long p, int K) {
    i64 M = ipow64(p, K);
    for (auto& g : gens)
        for (auto& x : g) x = posmod(x, M);
    Hermite H;
    H.cols.assign(n, IVec(n, 0));
    H.v.assign(n, K);
    for (int i = 0; i < n; ++i) {
        int best = K, bi = -1;
        for (size_t c = 0; c < gens.size(); ++c) {
            int v = val_mod(gens[c][i], p, K);
            if (v < best) {
                best = v;
                bi = static_cast<int>(c);
            }
        }
        if (bi < 0) {
            H.cols[i][i] = M;
            H.v[i] = K;
            continue;
        }
        IVec piv = gens[bi];
        gens.erase(gens.begin() + bi);
        i64 pv = ipow64(p, best);
        i64 unit = piv[i] / pv;
        i64 inv = invmod(unit, M);
        for (auto& x : piv) x = mulmod(x, inv, M);
        for (auto& g : gens) {
            if (g[i] == 0) continue;
            i64 f = g[i] / pv;  // exact: valuation of g[i] is at least best
            for (int r = 0; r < n; ++r) g[r] = posmod(g[r] - mulmod(f, piv[r], M), M);
        }
        IVec extra(n);
        i64 scale = ipow64(p, K - best);
        bool nz = false;
        for (int r = 0; r < n; ++r) {
            extra[r] = mulmod(piv[r], scale, M);
            if (extra[r] != 0) nz = true;
        }
        if (nz) gens.push_back(extra);
        H.cols[i] = piv;
        H.v[i] = best;
        gens.erase(std::remove_if(gens.begin(), gens.end(),
                                  [](const IVec& g) {
                                      for (auto x : g)
                                          if (x != 0) return false;
                                      return true;
                                  }),
                   gens.end());
    }
    // reduce entries below the diagonal; shifting by p^K e_r keeps a basis
    i64 Mk = ipow64(p, K);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            i64 d = ipow64(p, H.v[j]);
            i64 q = H.cols[i][j] / d;
            if (q == 0) continue;
            for (int r = j; r < n; ++r) H.cols[i][r] = posmod(H.cols[i][r] - mulmod(q, H.cols[j][r], Mk), Mk);
        }
    return H;
}

std::string hermite_key(const Hermite& H) {
    std::string s;
    for (size_t i = 0; i < H.cols.size(); ++i)
        for (size_t j = i; j < H.cols.size(); ++j) {
            s += std::to_string(H.cols[i][j]);
            s += ',';
        }
    return s;
}

struct Node {
    Hermite H;
    Mat gram;  // exact Gram matrix of the basis H / p^K
};

Mat node_gram(const QuadLattice& L, const Hermite& H, long p, int K) {
    int n = L.rank();
    Mat B(n, Vec(n));
    Q s = qpow(p, -K);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B[j][i] = Q(Z(static_cast<long>(H.cols[i][j]))) * s;
    return matmul(matmul(transpose(B), L.gram), B);
}

FMat gram_mod(const Mat& G, i64 m) {
    FMat out(G.size(), std::vector<i64>(G.size()));
    for (size_t i = 0; i < G.size(); ++i)
        for (size_t j = 0; j < G.size(); ++j) out[i][j] = mod_rational(G[i][j], m);
    return out;
}

// Kernel of a matrix over F_p as column vectors.
std::vector<IVec> kernel_mod_p(FMat A, long p) {
    int rows = static_cast<int>(A.size());
    int cols = rows == 0 ? 0 : static_cast<int>(A[0].size());
    std::vector<int> pivcol;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (A[i][c] % p != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(A[piv], A[r]);
        i64 inv = invmod(posmod(A[r][c], p), p);
        for (auto& x : A[r]) x = posmod(x * inv, p);
        for (int i = 0; i < rows; ++i) {
            if (i == r) continue;
            i64 f = posmod(A[i][c], p);
            if (f == 0) continue;
            for (int j = 0; j < cols; ++j) A[i][j] = posmod(A[i][j] - f * A[r][j], p);
        }
        pivcol.push_back(c);
        ++r;
    }
    std::vector<bool> isp(cols, false);
    for (int c : pivcol) isp[c] = true;
    std::vector<IVec> out;
    for (int f = 0; f < cols; ++f) {
        if (isp[f]) continue;
        IVec v(cols, 0);
        v[f] = 1;
        for (size_t i = 0; i < pivcol.size(); ++i) v[pivcol[i]] = posmod(-A[i][f], p);
        out.push_back(v);
    }
    return out;
}

struct Context {
    const QuadLattice& L;
    long p;
    int K;
    int n;
    int val;
};

OverlatticeEntry make_entry(const Context& C, const Hermite& H, const Mat& gram, const std::string& key) {
    OverlatticeEntry e;
    e.key = key;
    e.rank = C.n;
    e.gram = gram;
    e.basis.assign(C.n, Vec(C.n));
    Q s = qpow(C.p, -C.K);
    int sumv = 0;
    for (int i = 0; i < C.n; ++i) {
        sumv += H.v[i];
        for (int j = 0; j < C.n; ++j) e.basis[j][i] = Q(Z(static_cast<long>(H.cols[i][j]))) * s;
    }
    e.ell = C.n * C.K - sumv;
    e.val = C.val - 2 * e.ell;
    auto U = finite_space_of(gram_mod(gram, C.p), C.p);
    e.t = U.t;
    e.chi0 = U.chi0;
    return e;
}

// Children of a node: L' + <v/p> for isotropic lines in the radical of L' mod p.
std::vector<Hermite> children(const Context& C, const Node& node) {
    long p = C.p;
    i64 p2 = p * p;
    FMat g2 = gram_mod(node.gram, p2);
    FMat g1 = g2;
    for (auto& row : g1)
        for (auto& x : row) x %= p;
    auto ker = kernel_mod_p(g1, p);
    int t = static_cast<int>(ker.size());
    std::vector<Hermite> out;
    if (t == 0) return out;
    i64 total = ipow64(p, t);
    for (i64 code = 1; code < total; ++code) {
        std::vector<i64> lam(t);
        i64 x = code;
        int first = -1;
        for (int j = 0; j < t; ++j) {
            lam[j] = x % p;
            x /= p;
            if (lam[j] != 0 && first < 0) first = j;
        }
        if (lam[first] != 1) continue;  // one representative per line
        IVec c(C.n, 0);
        for (int j = 0; j < t; ++j)
            for (int i = 0; i < C.n; ++i) c[i] = (c[i] + lam[j] * ker[j][i]) % p;
        i128 q = 0;
        for (int i = 0; i < C.n; ++i)
            for (int j = 0; j < C.n; ++j) q += static_cast<i128>(c[i]) * g2[i][j] % p2 * c[j];
        if (q % p2 != 0) continue;
        IVec w(C.n, 0);
        for (int r = 0; r < C.n; ++r) {
            i128 s = 0;
            for (int i = 0; i < C.n; ++i) s += static_cast<i128>(node.H.cols[i][r]) * c[i];
            if (s % p != 0) throw Error("Internal", "overlattice generator not divisible by p");
            w[r] = static_cast<i64>(s / p);
        }
        IMat gens = node.H.cols;
        gens.push_back(w);
        out.push_back(hermite_zp(gens, C.n, p, C.K));
    }
    return out;
}

Context make_context(const QuadLattice& L) {
    if (!is_integral(L)) throw Error("NotIntegral", "overlattices need an integral lattice");
    auto a = fundamental_invariants(L);
    int K = 0, val = 0;
    for (int x : a) {
        K = std::max(K, x);
        val += x;
    }
    double bits = K * std::log2(static_cast<double>(L.ctx.p));
    if (bits > 61) throw Error("BudgetExceeded", "p^K exceeds the 64-bit Hermite arithmetic");
    return Context{L, L.ctx.p, K, L.rank(), val};
}

Hermite root_hermite(const Context& C) {
    IMat gens;
    return hermite_zp(gens, C.n, C.p, C.K);
}

}  // namespace

std::string gram_key(const QuadLattice& L) {
    std::string s = std::to_string(L.ctx.p) + "|";
    for (const auto& row : L.gram) {
        for (const auto& x : row) s += to_string(x) + ",";
        s += ";";
    }
    return s;
}

std::vector<OverlatticeEntry> minimal_overlattices(const QuadLattice& L) {
    Context C = make_context(L);
    Node root{root_hermite(C), L.gram};
    std::vector<OverlatticeEntry> out;
    std::set<std::string> seen;
    for (auto& H : children(C, root)) {
        auto key = hermite_key(H);
        if (!seen.insert(key).second) continue;
        out.push_back(make_entry(C, H, node_gram(L, H, C.p, C.K), key));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
    return out;
}

std::vector<OverlatticeEntry> enumerate_integral_overlattices(const QuadLattice& L, const OverlatticeLimits& lim) {
    if (!lim.force && (L.rank() > lim.max_rank))
        throw Error("Guard", "rank > " + std::to_string(lim.max_rank) + " (use --force)");
    Context C = make_context(L);
    if (!lim.force && C.val > lim.max_val)
        throw Error("Guard", "val > " + std::to_string(lim.max_val) + " (use --force)");
    std::vector<OverlatticeEntry> out;
    std::unordered_set<std::string> seen;
    std::deque<Node> queue;
    Hermite root = root_hermite(C);
    std::string rk = hermite_key(root);
    seen.insert(rk);
    queue.push_back({root, L.gram});
    out.push_back(make_entry(C, root, L.gram, rk));
    while (!queue.empty()) {
        Node node = std::move(queue.front());
        queue.pop_front();
        for (auto& H : children(C, node)) {
            auto key = hermite_key(H);
            if (!seen.insert(key).second) continue;
            Mat g = node_gram(L, H, C.p, C.K);
            out.push_back(make_entry(C, H, g, key));
            queue.push_back({std::move(H), std::move(g)});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.ell != b.ell) return a.ell < b.ell;
        return a.key < b.key;
    });
    return out;
}

namespace {

struct Lru {
    std::mutex mu;
    size_t cap = 4096;
    std::list<std::pair<std::string, std::shared_ptr<const std::vector<OverlatticeEntry>>>> items;
    std::unordered_map<std::string, decltype(items)::iterator> index;
};

Lru& lru() {
    static Lru c;
    return c;
}

}  // namespace

std::shared_ptr<const std::vector<OverlatticeEntry>> cached_overlattices(const QuadLattice& L,
                                                                         const OverlatticeLimits& lim) {
    auto key = gram_key(L);
    auto& c = lru();
    {
        std::lock_guard<std::mutex> g(c.mu);
        auto it = c.index.find(key);
        if (it != c.index.end()) {
            c.items.splice(c.items.begin(), c.items, it->second);
            return it->second->second;
        }
    }
    auto res = std::make_shared<const std::vector<OverlatticeEntry>>(enumerate_integral_overlattices(L, lim));
    std::lock_guard<std::mutex> g(c.mu);
    if (c.index.count(key)) return c.index[key]->second;
    c.items.emplace_front(key, res);
    c.index[key] = c.items.begin();
    while (c.items.size() > c.cap) {
        c.index.erase(c.items.back().first);
        c.items.pop_back();
    }
    return res;
}

void set_overlattice_cache_capacity(size_t cap) {
    auto& c = lru();
    std::lock_guard<std::mutex> g(c.mu);
    c.cap = std::max<size_t>(cap, 1);
    while (c.items.size() > c.cap) {
        c.index.erase(c.items.back().first);
        c.items.pop_back();
    }
}

size_t overlattice_cache_size() {
    auto& c = lru();
    std::lock_guard<std::mutex> g(c.mu);
    return c.items.size();
}

void clear_overlattice_cache() {
    auto& c = lru();
    std::lock_guard<std::mutex> g(c.mu);
    c.items.clear();
    c.index.clear();
}

std::vector<std::pair<std::string, std::shared_ptr<const std::vector<OverlatticeEntry>>>> overlattice_cache_snapshot() {
    auto& c = lru();
    std::lock_guard<std::mutex> g(c.mu);
    return {c.items.begin(), c.items.end()};
}

void overlattice_cache_insert(const std::string& key, std::vector<OverlatticeEntry> entries) {
    auto& c = lru();
    std::lock_guard<std::mutex> g(c.mu);
    if (c.index.count(key)) return;
    c.items.emplace_back(key, std::make_shared<const std::vector<OverlatticeEntry>>(std::move(entries)));
    c.index[key] = std::prev(c.items.end());
    while (c.items.size() > c.cap) {
        c.index.erase(c.items.back().first);
        c.items.pop_back();
    }
}

std::map<int, long> count_overlattices_by_subgroups(const QuadLattice& L) {
    if (!is_integral(L)) throw Error("NotIntegral", "discriminant group needs an integral lattice");
    long p = L.ctx.p;
    auto D = diagonalize_full(L);
    std::vector<int> a;
    std::vector<i64> u;
    int A = 0;
    for (const auto& d : D.d) a.push_back(vp(d, p)), A = std::max(A, a.back());
    i64 PA = ipow64(p, A);
    for (const auto& d : D.d) u.push_back(mod_rational(unit_part(d, p), PA));
    int n = static_cast<int>(a.size());
    std::vector<i64> ord(n);
    i64 size = 1;
    for (int i = 0; i < n; ++i) {
        ord[i] = ipow64(p, a[i]);
        size *= ord[i];
    }
    if (size > 2000000) throw Error("BudgetExceeded", "discriminant group too large");
    auto decode = [&](i64 code) {
        std::vector<i64> x(n);
        for (int i = 0; i < n; ++i) {
            x[i] = code % ord[i];
            code /= ord[i];
        }
        return x;
    };
    auto encode = [&](const std::vector<i64>& x) {
        i64 code = 0;
        for (int i = n - 1; i >= 0; --i) code = code * ord[i] + posmod(x[i], ord[i]);
        return code;
    };
    // pairing b(x, y) = sum x_i y_i u_i / p^{a_i}; integral iff numerator over p^A vanishes
    auto pair_integral = [&](const std::vector<i64>& x, const std::vector<i64>& y) {
        i128 s = 0;
        for (int i = 0; i < n; ++i) {
            i128 term = static_cast<i128>(x[i]) * y[i] % PA * u[i] % PA * ipow64(p, A - a[i]) % PA;
            s = (s + term) % PA;
        }
        return s == 0;
    };
    std::vector<std::vector<i64>> elems(size);
    std::vector<i64> iso;
    for (i64 c = 0; c < size; ++c) {
        elems[c] = decode(c);
        if (c != 0 && pair_integral(elems[c], elems[c])) iso.push_back(c);
    }
    struct Sub {
        std::vector<i64> members;  // sorted codes
        std::vector<i64> gens;
    };
    std::map<int, long> counts;
    std::set<std::vector<i64>> seen;
    std::deque<Sub> queue;
    queue.push_back({{0}, {}});
    seen.insert({0});
    while (!queue.empty()) {
        Sub s = std::move(queue.front());
        queue.pop_front();
        int ell = 0;
        for (size_t m = s.members.size(); m > 1; m /= p) ++ell;
        counts[ell] += 1;
        std::set<i64> mem(s.members.begin(), s.members.end());
        for (i64 x : iso) {
            if (mem.count(x)) continue;
            bool ok = true;
            for (i64 g : s.gens)
                if (!pair_integral(elems[x], elems[g])) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            std::set<i64> next;
            for (i64 h : s.members) {
                std::vector<i64> y = elems[h];
                for (int k = 0;; ++k) {
                    i64 code = encode(y);
                    if (!next.insert(code).second && k > 0) break;
                    for (int i = 0; i < n; ++i) y[i] += elems[x][i];
                    if (k > size) break;
                }
            }
            std::vector<i64> key(next.begin(), next.end());
            if (!seen.insert(key).second) continue;
            Sub t{key, s.gens};
            t.gens.push_back(x);
            queue.push_back(std::move(t));
        }
    }
    return counts;
}

SubLattice restrict_to_sublattice(const QuadLattice& ambient, const Mat& basis_cols, const std::vector<Vec>& subspace) {
    long p = ambient.ctx.p;
    int n = ambient.rank();
    if (subspace.empty()) throw Error("DegenerateSubspace", "empty subspace");
    // annihilator of the subspace under the standard dot product
    Mat S(subspace.begin(), subspace.end());
    auto ann = kernel(S);
    Mat FB;
    if (!ann.empty()) FB = matmul(Mat(ann.begin(), ann.end()), basis_cols);
    std::vector<Vec> coeffs;
    if (FB.empty()) {
        for (int i = 0; i < n; ++i) {
            Vec e(n, Q(0));
            e[i] = 1;
            coeffs.push_back(e);
        }
    } else {
        coeffs = kernel(FB);
    }
    // saturate the rational span of coeffs inside Z_p^n by p-adic pivoting
    Mat R(coeffs.begin(), coeffs.end());
    int k = static_cast<int>(R.size());
    std::vector<bool> done(k, false);
    for (int step = 0; step < k; ++step) {
        int br = -1, bc = -1, bv = INT32_MAX;
        for (int r = 0; r < k; ++r) {
            if (done[r]) continue;
            for (int c = 0; c < n; ++c)
                if (R[r][c] != 0 && vp(R[r][c], p) < bv) {
                    bv = vp(R[r][c], p);
                    br = r;
                    bc = c;
                }
        }
        if (br < 0) throw Error("DegenerateSubspace", "subspace meets the lattice in lower rank");
        Q inv = 1 / R[br][bc];
        for (auto& x : R[br]) x *= inv;
        for (int r = 0; r < k; ++r) {
            if (r == br || R[r][bc] == 0) continue;
            Q f = R[r][bc];
            for (int c = 0; c < n; ++c) R[r][c] -= f * R[br][c];
        }
        done[br] = true;
    }
    SubLattice out;
    out.basis.assign(n, Vec(k, Q(0)));
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < n; ++i) {
            Q s = 0;
            for (int l = 0; l < n; ++l) s += basis_cols[i][l] * R[j][l];
            out.basis[i][j] = s;
        }
    out.lattice = base_change(ambient, out.basis);
    return out;
}

}  // namespace siegel
