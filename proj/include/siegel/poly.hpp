#pragma once

#include <string>
#include <vector>

#include "siegel/arith.hpp"

namespace siegel {

// Dense univariate polynomial over Q, ascending powers of X.
struct Poly {
    std::vector<Q> c;

    Poly() = default;
    explicit Poly(std::vector<Q> coeffs) : c(std::move(coeffs)) { trim(); }
    static Poly constant(const Q& a) { return Poly(std::vector<Q>{a}); }
    static Poly monomial(const Q& a, int k);

    int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c.empty(); }
    Q coeff(int k) const { return (k >= 0 && k < static_cast<int>(c.size())) ? c[k] : Q(0); }
    void trim();
    bool is_integral() const;

    Q eval(const Q& x) const;
    Poly derivative() const;
    // X -> a X
    Poly substitute_scale(const Q& a) const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(const Q& a) const;
    Poly& operator+=(const Poly& o);
    bool operator==(const Poly& o) const;
    bool operator!=(const Poly& o) const { return !(*this == o); }

    std::vector<std::string> to_strings() const;
    std::string str() const;
};

}  // namespace siegel
