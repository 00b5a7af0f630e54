#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace siegel {

using Z = mpz_class;
using Q = mpq_class;
using i64 = std::int64_t;
using i128 = __int128;

// Every failure carries a short machine-readable code ("NotIntegral", ...).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// p-adic valuation; throws ZeroArgument for 0.
int vp(const Z& a, long p);
int vp(const Q& a, long p);

// a / p^vp(a)
Q unit_part(const Q& a, long p);

// Legendre symbol (a|p) in {-1,0,1}.
int legendre(const Z& a, long p);
int legendre(i64 a, long p);

// Legendre class of the unit part of a nonzero p-adic rational.
int unit_class(const Q& a, long p);

// a mod m for a rational with denominator prime to m, result in [0, m).
Z mod_rational(const Q& a, const Z& m);
i64 mod_rational(const Q& a, i64 m);

Z zpow(long b, unsigned e);
// p^e for any integer e
Q qpow(long p, int e);

i64 ipow64(i64 b, unsigned e);
i64 mulmod(i64 a, i64 b, i64 m);
i64 powmod(i64 a, i64 e, i64 m);
// inverse of a unit modulo m (m a prime power)
i64 invmod(i64 a, i64 m);
i64 posmod(i64 a, i64 m);

bool is_prime(long p);
int sign_of(const Q& a);

std::string to_string(const Q& a);
Q parse_rational(const std::string& s);

}  // namespace siegel
