#pragma once

#include <optional>
#include <string>
#include <vector>

#include "siegel/arith.hpp"

namespace siegel {

using Vec = std::vector<Q>;
using Mat = std::vector<Vec>;

struct PrimeCtx {
    long p = 3;
    long r = 2;  // smallest positive non-residue mod p
    static PrimeCtx make(long p);
    bool operator==(const PrimeCtx& o) const { return p == o.p; }
};

// Rank-n lattice over Z_p given by its Gram matrix in a fixed basis.
struct QuadLattice {
    PrimeCtx ctx;
    Mat gram;
    int rank() const { return static_cast<int>(gram.size()); }
};

QuadLattice make_lattice(const PrimeCtx& ctx, const Mat& gram);
QuadLattice diag_lattice(const PrimeCtx& ctx, const std::vector<Q>& d);

struct DiagEntry {
    int a;  // p-adic valuation
    int u;  // Legendre class of the unit part
    bool operator==(const DiagEntry& o) const { return a == o.a && u == o.u; }
};

// Congruence diagonalization T^t G T = diag(d). T is unimodular over Z_(p).
struct Diagonalization {
    std::vector<Q> d;
    Mat T;  // columns are the new basis vectors in old coordinates
};
Diagonalization diagonalize_full(const QuadLattice& L);

// Sorted by (a, original position).
std::vector<DiagEntry> diagonalize(const QuadLattice& L);

bool is_integral(const QuadLattice& L);
std::vector<int> fundamental_invariants(const QuadLattice& L);

struct Invariants {
    int val = 0;
    int type = 0;
    Q det;
    Q disc;
    int det_class = 1;   // Legendre class of the unit part of det
    int disc_class = 1;  // Legendre class of the unit part of disc
    int chi = 1;
    int hasse = 1;
};
Invariants invariants(const QuadLattice& L);

int hilbert_symbol(const Q& a, const Q& b, const PrimeCtx& ctx);

QuadLattice dual(const QuadLattice& L);
QuadLattice direct_sum(const QuadLattice& A, const QuadLattice& B);
QuadLattice rescale(const QuadLattice& L, int k);
// Gram of the lattice spanned by the columns of U (expressed in L's basis).
QuadLattice base_change(const QuadLattice& L, const Mat& U);

struct VertexInfo {
    bool vertex;
    int t;
};
VertexInfo is_vertex(const QuadLattice& L);

// Rank-m diagonal form with chi = eps (0 allowed: odd valuation) and the given Hasse invariant.
QuadLattice ambient_space(int m, int eps, int hasse, const PrimeCtx& ctx);
// Self-dual lattice H_m^eps.
QuadLattice self_dual(int m, int eps, const PrimeCtx& ctx);

// Basis (as vectors) of the orthogonal complement of span(sub) in the space with Gram G.
std::vector<Vec> orthogonal_complement(const Mat& G, const std::vector<Vec>& sub);

struct JordanBlock {
    int scale;
    int rank;
    int unit_class;  // Legendre class of the unit part of the block determinant
    bool operator==(const JordanBlock& o) const {
        return scale == o.scale && rank == o.rank && unit_class == o.unit_class;
    }
};
struct JordanProfile {
    PrimeCtx ctx;
    std::vector<JordanBlock> blocks;
    std::optional<int> hasse_bit;
    bool operator==(const JordanProfile& o) const {
        return ctx == o.ctx && blocks == o.blocks && hasse_bit == o.hasse_bit;
    }
};
JordanProfile jordan_profile(const QuadLattice& L);
// Diagonal representative diag(u_i p^{a_i}) with u_i in {1, r}.
QuadLattice canonical_diagonal(const QuadLattice& L);

// Matrix helpers over Q.
Mat identity(int n);
Mat transpose(const Mat& A);
Mat matmul(const Mat& A, const Mat& B);
Q determinant(const Mat& A);
Mat inverse(const Mat& A);
int matrix_rank(const Mat& A);
// Kernel of A (rows x cols) as column vectors.
std::vector<Vec> kernel(const Mat& A);
Q dot_form(const Mat& G, const Vec& x, const Vec& y);

}  // namespace siegel
