#pragma once

#include <string>
#include <vector>

#include "siegel/overlattice.hpp"
#include "siegel/padic.hpp"
#include "siegel/poly.hpp"

namespace siegel {

// Odd corank weights: m(t,s;X) at eps*X. Requires s = 0 when t is even (t >= 1).
Poly weight_poly(long q, int t, int s, int eps);
// -d/dX at X = 1 of weight_poly, from the closed case list.
Z weight_factor(long q, int t, int s, int eps);
// Even corank weights wt^flat(t,s,chi; eps*X). Requires s = 0 when t is odd.
Poly weight_poly_flat(long q, int t, int s, int chi, int eps);

// Normalizer for targets H_{n+1+2k}; evaluate at X = q^-k.
Poly nor_poly(int n, int eps, long q);

// Normalizer for targets H_{n+2k}: numerator / (1 - root*X), root = eps*chi(L).
struct NorFlat {
    Poly numerator;
    int root = 0;
    // Throws Pole at X = 1/root.
    Q eval(const Q& x) const;
};
NorFlat nor_flat_poly(int n, int eps, int chiL, long q);

// Den(H_m^eps, L) by the weighted overlattice sum. Zero for non-integral L.
Q local_density_closed(int m, int eps, const QuadLattice& L, const OverlatticeLimits& lim = {});

Poly den_poly(const QuadLattice& L, int eps, const OverlatticeLimits& lim = {});
Poly den_flat_poly(const QuadLattice& L, int eps, const OverlatticeLimits& lim = {});
// Truncated sum over t(L') <= 2, checked against the polynomial and the functional equation.
Q den_flat_at_1(const QuadLattice& L, int eps, const OverlatticeLimits& lim = {});

int fe_sign(const QuadLattice& L, int eps);
// Same sign computed with an arbitrary unit u of class eps.
int fe_sign_with_unit(const QuadLattice& L, const Q& u);

// -d/dX Den at X = 1; when the sign is -1 also through the weight factors.
Q pden(const QuadLattice& L, int eps, const OverlatticeLimits& lim = {});
// Sum of weight factors over all integral overlattices.
Q pden_weight_sum(const QuadLattice& L, int eps, const OverlatticeLimits& lim = {});

struct Report {
    std::string name;
    bool ok = true;
    std::vector<std::string> failures;
    std::vector<std::pair<std::string, std::string>> facts;  // label, value
    void fail(const std::string& what) {
        ok = false;
        failures.push_back(what);
    }
    void note(const std::string& k, const std::string& v) { facts.push_back({k, v}); }
    std::string first_failure() const { return failures.empty() ? std::string() : failures.front(); }
    // Throws IdentityViolated when !ok.
    void require() const;
};

Report check_functional_equation(const QuadLattice& L, int eps, const OverlatticeLimits& lim = {});
Report check_functional_equation_flat(const QuadLattice& L, int eps, const OverlatticeLimits& lim = {});

// L = Lflat + <x>, x perpendicular with (x,x) = x_norm; val(x) must exceed the largest invariant of Lflat.
Report induction_step(const QuadLattice& Lflat, const Q& x_norm, int eps, const OverlatticeLimits& lim = {});
// Same, with Lflat spanned by the first n-1 columns of `basis` inside `ambient` and x from the complement.
Report induction_step_in(const QuadLattice& ambient, const Mat& basis, int eps, const OverlatticeLimits& lim = {});

// eps' with H_{n-r+1}^{eps'} + M = H_{n+1}^eps, n = rank(Lflat) + r.
int cancellation_sign(int rank_flat, const QuadLattice& M, int eps);
Report cancellation_check(const QuadLattice& Lflat, const QuadLattice& M, int eps, const OverlatticeLimits& lim = {});

Q whittaker_value(const QuadLattice& L, int eps, int k, const OverlatticeLimits& lim = {});
// Coefficient of log q in the derivative at s = 0; requires sign -1.
Q whittaker_derivative(const QuadLattice& L, int eps, const OverlatticeLimits& lim = {});

}  // namespace siegel
