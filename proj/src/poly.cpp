#include "siegel/poly.hpp"

namespace siegel {

Poly Poly::monomial(const Q& a, int k) {
    std::vector<Q> v(k + 1, Q(0));
    v[k] = a;
    return Poly(v);
}

void Poly::trim() {
    for (auto& x : c) x.canonicalize();
    while (!c.empty() && c.back() == 0) c.pop_back();
}

bool Poly::is_integral() const {
    for (const auto& x : c)
        if (x.get_den() != 1) return false;
    return true;
}

Q Poly::eval(const Q& x) const {
    Q r = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

Poly Poly::derivative() const {
    std::vector<Q> d;
    for (size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<long>(k));
    return Poly(d);
}

Poly Poly::substitute_scale(const Q& a) const {
    std::vector<Q> d(c.size());
    Q f = 1;
    for (size_t k = 0; k < c.size(); ++k) {
        d[k] = c[k] * f;
        f *= a;
    }
    return Poly(d);
}

Poly Poly::operator+(const Poly& o) const {
    std::vector<Q> d(std::max(c.size(), o.c.size()), Q(0));
    for (size_t k = 0; k < c.size(); ++k) d[k] += c[k];
    for (size_t k = 0; k < o.c.size(); ++k) d[k] += o.c[k];
    return Poly(d);
}

Poly Poly::operator-(const Poly& o) const { return *this + o * Q(-1); }

Poly Poly::operator*(const Poly& o) const {
    if (is_zero() || o.is_zero()) return Poly();
    std::vector<Q> d(c.size() + o.c.size() - 1, Q(0));
    for (size_t i = 0; i < c.size(); ++i)
        for (size_t j = 0; j < o.c.size(); ++j) d[i + j] += c[i] * o.c[j];
    return Poly(d);
}

Poly Poly::operator*(const Q& a) const {
    std::vector<Q> d = c;
    for (auto& x : d) x *= a;
    return Poly(d);
}

Poly& Poly::operator+=(const Poly& o) {
    *this = *this + o;
    return *this;
}

bool Poly::operator==(const Poly& o) const {
    if (c.size() != o.c.size()) return false;
    for (size_t k = 0; k < c.size(); ++k)
        if (c[k] != o.c[k]) return false;
    return true;
}

std::vector<std::string> Poly::to_strings() const {
    std::vector<std::string> out;
    for (const auto& x : c) out.push_back(to_string(x));
    return out;
}

std::string Poly::str() const {
    if (c.empty()) return "0";
    std::string s;
    for (size_t k = 0; k < c.size(); ++k) {
        if (c[k] == 0) continue;
        std::string a = to_string(c[k]);
        if (!s.empty()) s += (c[k] > 0) ? " + " : " - ";
        else if (c[k] < 0) s += "-";
        if (a[0] == '-') a = a.substr(1);
        if (k == 0) s += a;
        else {
            if (a != "1") s += a + "*";
            s += (k == 1) ? "X" : "X^" + std::to_string(k);
        }
    }
    return s;
}

}  // namespace siegel
