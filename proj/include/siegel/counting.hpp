#pragma once

#include <optional>
#include <string>
#include <vector>

#include "siegel/geometry.hpp"
#include "siegel/padic.hpp"
#include "siegel/siegel.hpp"

namespace siegel {

// Coset counts for a lattice of rank t and type t:
//   plus      (p L^dual) with val >= 1
//   zero      (p L^dual) with val = 0
//   minus     L^dual with val >= 0, outside (p L^dual) with val >= 0
// zero splits by chi(<x>) when chi(L) = 0, by chi(<x>^perp) otherwise.
struct MuProfile {
    Z plus, zero, minus, zero_plus, zero_minus;
    Z zero_s(int s) const { return s == 1 ? zero_plus : zero_minus; }
    bool operator==(const MuProfile& o) const {
        return plus == o.plus && zero == o.zero && minus == o.minus && zero_plus == o.zero_plus &&
               zero_minus == o.zero_minus;
    }
};

MuProfile mu_profile(const QuadLattice& L);

namespace brute {
// Literal scan over coset representatives with rational arithmetic; the perpendicular
// character comes from an explicit orthogonal complement.
MuProfile mu_profile(const QuadLattice& L);
}  // namespace brute

// The weighted combinations; zero exactly when the pair is admissible.
Q counting_odd_value(const MuProfile& mu, int t, int s, long q);
Q counting_even_value(const MuProfile& mu, int t, int s, long q);
bool counting_odd_admissible(const QuadLattice& L, int s);
bool counting_even_admissible(const QuadLattice& L, int s);

// Throw InadmissiblePair outside the hypotheses; the report fails when the value is nonzero.
Report check_counting_odd(const QuadLattice& L, int s);
Report check_counting_even(const QuadLattice& L, int s);

// An index-q overlattice M of L inside p^-1 L with type t, following the two
// constructions (largest invariant >= 3, or an isotropic line in the scale-p^2 block).
// Empty when neither applies. The basis is in the coordinates of L's diagonal basis.
struct Companion {
    QuadLattice M;
    std::string construction;  // "top" or "plane"
};
std::optional<Companion> companion_lattice(const QuadLattice& L);
// Every index-q overlattice of L inside p^-1 L that still has type t.
std::vector<QuadLattice> index_q_type_t_overlattices(const QuadLattice& L);

// mu(L) - q mu(M), componentwise.
struct MuDiff {
    Z plus, zero, minus, zero_plus, zero_minus;
};
MuDiff mu_difference(const MuProfile& L, const MuProfile& M, long q);

// Sum over integral overlattices L'f of Lflat outside Hor(Lflat) of
// vol(L'f) * sum over u in (L'f)^dual / L'f with val(u) >= 0 of wt(t(L'), sgn_{n+1}(L')),
// L' = L'f + <u + x>, where x is perpendicular with norm x_norm.
QSqrt pden_perp_jump(const QuadLattice& Lflat, const Q& x_norm, int eps, const OverlatticeLimits& lim = {});
// The inner sum for one overlattice, with n = rank(Lfprime) + 1.
Z perp_jump_inner(const QuadLattice& Lfprime, const Q& x_norm, int eps);

// Translation by L never changes the classification of a coset representative.
Report mu_translation_invariance(int trials, const PrimeCtx& ctx, unsigned long long seed);

}  // namespace siegel
