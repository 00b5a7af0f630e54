#pragma once

#include <vector>

#include "siegel/arith.hpp"
#include "siegel/padic.hpp"

namespace siegel {

// Quadratic space U = U0 + U1 over F_q with radical U1 of dimension t.
struct FiniteQuadSpace {
    long q = 3;
    int m = 0;
    int t = 0;
    int chi0 = 1;  // discriminant class of U0; +1 when U0 = 0
    int dim0() const { return m - t; }
};

using FMat = std::vector<std::vector<i64>>;

// Radical dimension and discriminant class of a symmetric matrix over F_q.
FiniteQuadSpace finite_space_of(const FMat& gram, long q);
FiniteQuadSpace reduce_mod_p(const QuadLattice& L);
// Diagonal Gram matrix realizing the space.
FMat finite_gram(const FiniteQuadSpace& U);

int sgn_m(const FiniteQuadSpace& U, int m);
inline int sgn_even(const FiniteQuadSpace& U) { return sgn_m(U, 0); }
inline int sgn_odd(const FiniteQuadSpace& U) { return sgn_m(U, 1); }

Z order_orthogonal(const FiniteQuadSpace& V);
Z count_isometries(const FiniteQuadSpace& U, const FiniteQuadSpace& V);
Z count_isotropic_subspaces(const FiniteQuadSpace& V, int b);
Z count_isotropic_vectors(const FiniteQuadSpace& V);
Z order_gl(long q, int b);

// Exhaustive enumeration, guarded to q <= 5 and m <= 4 unless forced.
namespace brute {
Z count_embeddings(const FMat& U, const FMat& V, long q, bool force = false);
Z order_orthogonal(const FMat& V, long q, bool force = false);
Z count_isotropic_subspaces(const FMat& V, int b, long q, bool force = false);
Z count_isotropic_vectors(const FMat& V, long q, bool force = false);
}  // namespace brute

}  // namespace siegel
