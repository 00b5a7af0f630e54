#pragma once

#include <string>
#include <vector>

#include "siegel/finite_quad.hpp"
#include "siegel/overlattice.hpp"
#include "siegel/padic.hpp"
#include "siegel/siegel.hpp"

namespace siegel {

// Largest type of a vertex lattice in V_m^eps.
int t_max(int m, int eps);

// Whether L embeds into the quadratic space of dimension m with chi = eps and Hasse invariant `hasse`.
bool embeds_in_space(const QuadLattice& L, int m, int eps, int hasse);

// rank(Lflat) must be n - 1.
bool is_coisotropic(const QuadLattice& Lflat, int n, int eps);
bool is_horizontal(const QuadLattice& Mflat, int n, int eps);

// Horizontal integral overlattices of Lflat (rank n-1, so n = rank + 1).
std::vector<OverlatticeEntry> hor_set(const QuadLattice& Lflat, int eps, const OverlatticeLimits& lim = {});

// Degree of the quasi-canonical lifting cycle of level s over the ring of integers.
Z quasi_canonical_degree(int s, bool ramified, long q);
Z primitive_degree(const QuadLattice& Mflat, int eps);
Z horizontal_degree(const QuadLattice& Lflat, int eps, const OverlatticeLimits& lim = {});

struct IntersectionResult {
    Q value;
    bool realizable = true;  // L embeds into V_{n+1}^eps
};
// Int(L) computed as the central derivative; 0 when L does not sit inside V_{n+1}^eps.
IntersectionResult intersection_number(const QuadLattice& L, int eps, const OverlatticeLimits& lim = {});

// a + b sqrt(q)
struct QSqrt {
    Q a, b;
    QSqrt(Q a_ = 0, Q b_ = 0) : a(std::move(a_)), b(std::move(b_)) {}
    bool is_zero() const { return a == 0 && b == 0; }
    bool operator==(const QSqrt& o) const { return a == o.a && b == o.b; }
    bool operator!=(const QSqrt& o) const { return !(*this == o); }
    std::string str() const;
};
QSqrt add(const QSqrt& x, const QSqrt& y);
QSqrt mul(const QSqrt& x, const QSqrt& y, long q);
// q^{e/2}
QSqrt half_power(long q, int e);

// Canonical lower-triangular Hermite form over Z_(p) of the lattice spanned by the columns.
Mat lattice_hnf(const Mat& gens, long p);

struct IndicatorTerm {
    std::string key;
    Mat basis;  // columns, in reference coordinates
    QSqrt coef;
};

struct IndicatorCombo {
    QuadLattice ambient;  // reference lattice; its Gram fixes the form
    std::vector<IndicatorTerm> terms;
    void add(const Mat& basis, const QSqrt& c);
    QSqrt eval(const Vec& x) const;
};

IndicatorCombo scale(const IndicatorCombo& c, const QSqrt& s);
IndicatorCombo combo_sum(const IndicatorCombo& a, const IndicatorCombo& b);
IndicatorCombo fourier(const IndicatorCombo& c);

struct ComboDiff {
    bool equal = true;
    Vec witness;  // first coset representative where they differ
    QSqrt left, right;
    long long points = 0;
};
// Exact comparison on every coset of p^lo Lambda_0 inside p^-hi Lambda_0.
ComboDiff compare_combos(const IndicatorCombo& a, const IndicatorCombo& b, double max_points = 5e7);
bool combos_equal(const IndicatorCombo& a, const IndicatorCombo& b);

// Vertex lattice of type 2d+2, diagonal in its own basis; the first 2d+2 entries have valuation 1.
struct VertexLatticeCtx {
    QuadLattice lattice;
    int d = 1;
    int m = 0;
    int eps = 1;
    FMat W;  // Lambda^dual / Lambda with the form p(x, x) mod p
    FiniteQuadSpace w_space() const;
    int chi_W() const;
};

// All diagonal patterns (units in {1, r}) giving a type-(2d+2) vertex lattice inside V_m^eps.
std::vector<VertexLatticeCtx> vertex_lattices(int m, int eps, int d, const PrimeCtx& ctx);
VertexLatticeCtx make_vertex_lattice(int m, int eps, int d, const PrimeCtx& ctx);

// Totally isotropic subspaces of W of the given dimension, each as a basis in RREF.
std::vector<std::vector<std::vector<i64>>> isotropic_subspaces(const FMat& W, int dim, long p);

// Reference-coordinate basis of Lambda + lift(U).
Mat lattice_over(const VertexLatticeCtx& V, const std::vector<std::vector<i64>>& U);

Q int_V_Lambda(const VertexLatticeCtx& V, const Vec& x);
Q c_V_Lambda(const VertexLatticeCtx& V, const Vec& x);
IndicatorCombo int_V_Lambda_combo(const VertexLatticeCtx& V);
IndicatorCombo c_V_Lambda_combo(const VertexLatticeCtx& V);
Q c_const(int d, long q);
Q c_prime(int d, long q);

// fourier(combo) = -combo, plus the pointwise table and the type-2 overlattice count.
Report check_local_modularity(const VertexLatticeCtx& V);

// Diagonal norms (w1, w2) of a plane W with Lflat + W in V_{n+1}^eps; throws when Lflat does not embed.
std::vector<Q> complement_plane(const QuadLattice& Lflat, int eps);

Report pden_difference_check(const QuadLattice& Lflat, int eps, const OverlatticeLimits& lim = {});

struct SaturatedStats {
    int tried = 0;
    int used = 0;  // embedded in V as well
};
Report saturated_horizontal_property(int trials, int m, int eps, const PrimeCtx& ctx, unsigned long long seed,
                                     SaturatedStats* stats = nullptr);

}  // namespace siegel
