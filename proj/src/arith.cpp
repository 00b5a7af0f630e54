#include "siegel/arith.hpp"

namespace siegel {

int vp(const Z& a, long p) {
    if (a == 0) throw Error("ZeroArgument", "valuation of zero");
    Z x = abs(a);
    int v = 0;
    Z pz = p;
    while (mpz_divisible_p(x.get_mpz_t(), pz.get_mpz_t())) {
        x /= pz;
        ++v;
    }
    return v;
}

int vp(const Q& a, long p) {
    if (a == 0) throw Error("ZeroArgument", "valuation of zero");
    return vp(Z(a.get_num()), p) - vp(Z(a.get_den()), p);
}

Q unit_part(const Q& a, long p) { return a / qpow(p, vp(a, p)); }

int legendre(const Z& a, long p) {
    Z pz = p;
    return mpz_legendre(a.get_mpz_t(), pz.get_mpz_t());
}

int legendre(i64 a, long p) {
    i64 r = a % p;
    if (r < 0) r += p;
    if (r == 0) return 0;
    i64 t = powmod(r, (p - 1) / 2, p);
    return t == 1 ? 1 : -1;
}

int unit_class(const Q& a, long p) {
    Q u = unit_part(a, p);
    return legendre(Z(u.get_num()), p) * legendre(Z(u.get_den()), p);
}

Z mod_rational(const Q& a, const Z& m) {
    Z den = a.get_den();
    Z inv;
    if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) == 0)
        throw Error("NotIntegral", "denominator not invertible modulo " + m.get_str());
    Z r = (Z(a.get_num()) * inv) % m;
    if (r < 0) r += m;
    return r;
}

i64 mod_rational(const Q& a, i64 m) {
    Z r = mod_rational(a, Z(static_cast<long>(m)));
    return r.get_si();
}

Z zpow(long b, unsigned e) {
    Z r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(b), e);
    return r;
}

Q qpow(long p, int e) {
    if (e >= 0) return Q(zpow(p, static_cast<unsigned>(e)));
    return Q(Z(1), zpow(p, static_cast<unsigned>(-e)));
}

i64 ipow64(i64 b, unsigned e) {
    i64 r = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (r > INT64_MAX / b) throw Error("Overflow", "power exceeds 64 bits");
        r *= b;
    }
    return r;
}

i64 mulmod(i64 a, i64 b, i64 m) { return static_cast<i64>((static_cast<i128>(a) * b) % m); }

i64 posmod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

i64 powmod(i64 a, i64 e, i64 m) {
    i64 r = 1 % m, x = posmod(a, m);
    while (e > 0) {
        if (e & 1) r = mulmod(r, x, m);
        x = mulmod(x, x, m);
        e >>= 1;
    }
    return r;
}

i64 invmod(i64 a, i64 m) {
    i64 g = m, x = posmod(a, m), s0 = 0, s1 = 1;
    i64 b = g;
    while (x != 0) {
        i64 q = b / x;
        i64 t = b - q * x;
        b = x;
        x = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    if (b != 1) throw Error("NotUnit", "no inverse modulo " + std::to_string(m));
    return posmod(s0, m);
}

bool is_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

int sign_of(const Q& a) { return sgn(a); }

std::string to_string(const Q& a) {
    Q c = a;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Q parse_rational(const std::string& s) {
    Q r;
    if (s.empty() || r.set_str(s, 10) != 0) throw Error("ParseError", "bad rational '" + s + "'");
    if (r.get_den() == 0) throw Error("ParseError", "zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

}  // namespace siegel
