#include "siegel/siegel.hpp"

#include "siegel/finite_quad.hpp"

namespace siegel {

namespace {

Q qp(long q, int e) { return qpow(q, e); }

Poly lin(const Q& c0, const Q& c1) { return Poly(std::vector<Q>{c0, c1}); }
Poly quad(const Q& c0, const Q& c2) { return Poly(std::vector<Q>{c0, Q(0), c2}); }

std::string join(const std::vector<std::string>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s + "]";
}

// sgn of the self-dual H_m^eps reduced mod p: eps for even m, 0 for odd m.
int sgn_selfdual(int m, int eps) { return (m % 2 == 0) ? eps : 0; }

std::shared_ptr<const std::vector<OverlatticeEntry>> overlattices_of(const QuadLattice& L,
                                                                     const OverlatticeLimits& lim) {
    return cached_overlattices(L, lim);
}

}  // namespace

Poly weight_poly(long q, int t, int s, int eps) {
    if (t < 0) throw Error("InadmissibleParams", "negative type");
    if (t == 0) return Poly::constant(1);
    if ((t - 1) % 2 != 0 && s != 0) throw Error("InadmissibleParams", "s must vanish when t is even");
    // (t-1)/2 is an integer whenever s != 0
    Poly m = lin(1, s == 0 ? Q(0) : Q(s) * qp(q, (t - 1) / 2));
    for (int i = 0; 2 * i < t - 1; ++i) m = m * quad(1, -qp(q, 2 * i));
    return m.substitute_scale(eps);
}

Z weight_factor(long q, int t, int s, int eps) {
    if (t < 0) throw Error("InadmissibleParams", "negative type");
    if (t > 0 && (t - 1) % 2 != 0 && s != 0) throw Error("InadmissibleParams", "s must vanish when t is even");
    if (t == 0) return 0;
    if (t == 1) return -eps * s;
    Q v = 2 * (1 + (s == 0 ? Q(0) : Q(eps * s) * qp(q, (t - 1) / 2)));
    for (int i = 1; 2 * i < t - 1; ++i) v *= (1 - qp(q, 2 * i));
    v.canonicalize();
    return v.get_num();
}

Poly weight_poly_flat(long q, int t, int s, int chi, int eps) {
    if (t < 0) throw Error("InadmissibleParams", "negative type");
    if (t == 0) return Poly::constant(1);
    if (t % 2 != 0 && s != 0) throw Error("InadmissibleParams", "s must vanish when t is odd");
    Poly w = lin(1, s == 0 ? Q(0) : Q(s) * qp(q, t / 2)) * lin(1, -chi);
    for (int i = 1; 2 * i < t; ++i) w = w * quad(1, -qp(q, 2 * i));
    return w.substitute_scale(eps);
}

Poly nor_poly(int n, int eps, long q) {
    Poly r = lin(1, -Q(sgn_selfdual(n + 1, eps)) * ((n + 1) % 2 == 0 ? qp(q, -(n + 1) / 2) : Q(0)));
    for (int i = 1; 2 * i < n + 1; ++i) r = r * quad(1, -qp(q, -2 * i));
    return r;
}

Q NorFlat::eval(const Q& x) const {
    Q den = 1 - root * x;
    if (den == 0) throw Error("Pole", "normalizer evaluated at its pole");
    return numerator.eval(x) / den;
}

NorFlat nor_flat_poly(int n, int eps, int chiL, long q) {
    NorFlat f;
    Poly r = lin(1, -Q(sgn_selfdual(n, eps)) * (n % 2 == 0 ? qp(q, -n / 2) : Q(0)));
    for (int i = 0; 2 * i < n; ++i) r = r * quad(1, -qp(q, -2 * i));
    f.numerator = r;
    f.root = eps * chiL;
    return f;
}

Q local_density_closed(int m, int eps, const QuadLattice& L, const OverlatticeLimits& lim) {
    if (!is_integral(L)) return 0;
    int n = L.rank();
    if (m < n) throw Error("BadDimension", "target rank below lattice rank");
    long q = L.ctx.p;
    FiniteQuadSpace V{q, m, 0, eps};
    Q total = 0;
    for (const auto& e : *overlattices_of(L, lim)) {
        Z iso = count_isometries(e.kappa(q), V);
        total += qp(q, (n + 1 - m) * e.ell) * Q(iso);
    }
    return total * qp(q, -n * (2 * m - n - 1) / 2);
}

Poly den_poly(const QuadLattice& L, int eps, const OverlatticeLimits& lim) {
    if (!is_integral(L)) return Poly();
    long q = L.ctx.p;
    int n = L.rank();
    Poly total;
    for (const auto& e : *overlattices_of(L, lim))
        total += Poly::monomial(1, 2 * e.ell) * weight_poly(q, e.t, e.sgn(n + 1), eps);
    if (!total.is_integral()) throw Error("NotIntegral", "Siegel series with non-integral coefficients");
    return total;
}

Poly den_flat_poly(const QuadLattice& L, int eps, const OverlatticeLimits& lim) {
    if (!is_integral(L)) return Poly();
    long q = L.ctx.p;
    int n = L.rank();
    int chi = invariants(L).chi;
    Poly total;
    for (const auto& e : *overlattices_of(L, lim))
        total += Poly::monomial(qp(q, e.ell), 2 * e.ell) * weight_poly_flat(q, e.t, e.sgn(n), chi, eps);
    if (!total.is_integral()) throw Error("NotIntegral", "Siegel series with non-integral coefficients");
    return total;
}

Q den_flat_at_1(const QuadLattice& L, int eps, const OverlatticeLimits& lim) {
    if (!is_integral(L)) return 0;
    long q = L.ctx.p;
    int n = L.rank();
    int chi = invariants(L).chi;
    Q trunc = 0;
    for (const auto& e : *overlattices_of(L, lim)) {
        if (e.t > 2) continue;
        Q w = 1;
        if (e.t >= 1) w *= 1 - Q(eps * chi) / q;
        if (e.t == 2) w *= 1 + eps * e.sgn(n);
        trunc += qp(q, e.val / 2) * w;
    }
    Poly D = den_flat_poly(L, eps, lim);
    int val = invariants(L).val;
    Q via_fe = qp(q, val / 2) * D.eval(Q(1, q));
    Q direct = D.eval(1);
    if (trunc != via_fe || trunc != direct)
        throw Error("IdentityViolated", "even corank value at 1: truncated " + to_string(trunc) + ", functional equation " +
                                            to_string(via_fe) + ", direct " + to_string(direct));
    return trunc;
}

int fe_sign_with_unit(const QuadLattice& L, const Q& u) {
    int n = L.rank();
    auto I = invariants(L);
    int c = ((n + 1) * n / 2) % 2 == 0 ? 1 : -1;
    return hilbert_symbol(I.det, Q(-c) * u, L.ctx) * I.hasse;
}

int fe_sign(const QuadLattice& L, int eps) {
    Q u = eps == 1 ? Q(1) : Q(L.ctx.r);
    return fe_sign_with_unit(L, u);
}

Q pden_weight_sum(const QuadLattice& L, int eps, const OverlatticeLimits& lim) {
    if (!is_integral(L)) return 0;
    long q = L.ctx.p;
    int n = L.rank();
    Q s = 0;
    for (const auto& e : *overlattices_of(L, lim)) s += Q(weight_factor(q, e.t, e.sgn(n + 1), eps));
    return s;
}

Q pden(const QuadLattice& L, int eps, const OverlatticeLimits& lim) {
    Poly D = den_poly(L, eps, lim);
    Q d = -D.derivative().eval(1);
    if (is_integral(L) && fe_sign(L, eps) == -1) {
        Q w = pden_weight_sum(L, eps, lim);
        if (w != d)
            throw Error("IdentityViolated", "derivative " + to_string(d) + " differs from weight factor sum " + to_string(w));
    }
    return d;
}

void Report::require() const {
    if (ok) return;
    std::string msg = name;
    for (const auto& f : failures) msg += "; " + f;
    throw Error("IdentityViolated", msg);
}

Report check_functional_equation(const QuadLattice& L, int eps, const OverlatticeLimits& lim) {
    Report R;
    R.name = "functional-equation";
    Poly D = den_poly(L, eps, lim);
    int w = fe_sign(L, eps);
    R.note("sign", std::to_string(w));
    R.note("coefficients", join(D.to_strings()));
    if (!is_integral(L)) return R;
    int val = invariants(L).val;
    if (D.degree() > val) R.fail("degree " + std::to_string(D.degree()) + " exceeds val " + std::to_string(val));
    std::vector<Q> rhs(val + 1);
    for (int i = 0; i <= val; ++i) rhs[i] = Q(w) * D.coeff(val - i);
    Poly P(rhs);
    if (P != D) R.fail("lhs " + join(D.to_strings()) + " rhs " + join(P.to_strings()));
    if (w == -1 && D.eval(1) != 0) R.fail("value at 1 is nonzero with sign -1");
    return R;
}

Report check_functional_equation_flat(const QuadLattice& L, int eps, const OverlatticeLimits& lim) {
    Report R;
    R.name = "functional-equation-flat";
    Poly D = den_flat_poly(L, eps, lim);
    R.note("coefficients", join(D.to_strings()));
    if (!is_integral(L)) return R;
    long q = L.ctx.p;
    int N = invariants(L).val / 2;
    if (D.degree() > 2 * N) R.fail("degree " + std::to_string(D.degree()) + " exceeds 2*floor(val/2)");
    std::vector<Q> rhs(2 * N + 1);
    for (int j = 0; j <= 2 * N; ++j) rhs[2 * N - j] = D.coeff(j) * qp(q, N - j);
    Poly P(rhs);
    if (P != D) R.fail("lhs " + join(D.to_strings()) + " rhs " + join(P.to_strings()));
    return R;
}

namespace {

Report induction_core(const QuadLattice& Lflat, const QuadLattice& L, const QuadLattice& Lt, int eps,
                      const OverlatticeLimits& lim) {
    Report R;
    R.name = "induction";
    long q = L.ctx.p;
    int n = L.rank();
    int chi = invariants(Lflat).chi;
    Poly DL = den_poly(L, eps, lim);
    Poly DLt = den_poly(Lt, eps, lim);
    Poly DF = den_flat_poly(Lflat, eps, lim);
    Poly lhs = (DL - Poly::monomial(1, 2) * DLt) * lin(1, -eps * chi);
    Poly rhs = quad(1, -1) * DF;
    R.note("den", join(DL.to_strings()));
    R.note("den_tilde", join(DLt.to_strings()));
    R.note("den_flat", join(DF.to_strings()));
    if (lhs != rhs) R.fail("polynomial identity: " + lhs.str() + " vs " + rhs.str());

    for (int k = 0; k <= 2; ++k) {
        int m = n + 1 + 2 * k;
        Q a = local_density_closed(m, eps, L, lim);
        Q b = local_density_closed(m, eps, Lt, lim);
        Q c = local_density_closed(m - 2, eps, Lflat, lim);
        Q factor = (m % 2 == 0) ? Q((1 - eps * qp(q, -m / 2)) * (1 + eps * qp(q, -(m - 2) / 2))) : Q(1 - qp(q, -(m - 1)));
        Q right = qp(q, n + 1 - m) * b + factor * c;
        if (a != right) R.fail("densities at m=" + std::to_string(m) + ": " + to_string(a) + " vs " + to_string(right));
    }

    if (fe_sign(L, eps) == -1) {
        Q diff = pden(L, eps, lim) - pden(Lt, eps, lim);
        Q f1 = den_flat_at_1(Lflat, eps, lim);
        Q expect;
        if (chi == 0) {
            expect = 2 * f1;
        } else if (eps * chi == -1) {
            expect = f1;
        } else {
            // co-isotropic: (1 - X) cancels, leaving -Den^flat(1) - 2 Den^flat'(1)
            expect = -f1 - 2 * DF.derivative().eval(1);
        }
        R.note("pden_difference", to_string(diff));
        if (diff != expect) R.fail("derivative difference " + to_string(diff) + " vs " + to_string(expect));
    }
    return R;
}

}  // namespace

Report induction_step(const QuadLattice& Lflat, const Q& x_norm, int eps, const OverlatticeLimits& lim) {
    auto a = fundamental_invariants(Lflat);
    int top = a.empty() ? 0 : a.back();
    long p = Lflat.ctx.p;
    if (x_norm == 0 || vp(x_norm, p) <= top)
        throw Error("PreconditionViolated", "val(x) must exceed the largest invariant of the sublattice");
    QuadLattice L = direct_sum(Lflat, diag_lattice(Lflat.ctx, {x_norm}));
    QuadLattice Lt = direct_sum(Lflat, diag_lattice(Lflat.ctx, {x_norm / (p * p)}));
    return induction_core(Lflat, L, Lt, eps, lim);
}

Report induction_step_in(const QuadLattice& ambient, const Mat& basis, int eps, const OverlatticeLimits& lim) {
    int n = ambient.rank();
    long p = ambient.ctx.p;
    std::vector<Vec> sub;
    for (int j = 0; j < n - 1; ++j) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = basis[i][j];
        sub.push_back(v);
    }
    auto perp = orthogonal_complement(ambient.gram, sub);
    if (perp.size() != 1) throw Error("PreconditionViolated", "complement is not a line");
    Vec x = perp[0];
    Mat B(n, Vec(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n - 1; ++j) B[i][j] = basis[i][j];
        B[i][n - 1] = x[i];
    }
    QuadLattice L = base_change(ambient, B);
    Mat Bf(n, Vec(n - 1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n - 1; ++j) Bf[i][j] = basis[i][j];
    QuadLattice Lflat = base_change(ambient, Bf);
    auto a = fundamental_invariants(Lflat);
    int top = a.empty() ? 0 : a.back();
    Q xn = dot_form(ambient.gram, x, x);
    if (vp(xn, p) <= top) throw Error("PreconditionViolated", "val(x) must exceed the largest invariant of the sublattice");
    Mat Bt = B;
    for (int i = 0; i < n; ++i) Bt[i][n - 1] /= p;
    QuadLattice Lt = base_change(ambient, Bt);
    return induction_core(Lflat, L, Lt, eps, lim);
}

int cancellation_sign(int rank_flat, const QuadLattice& M, int eps) {
    int r = M.rank();
    int n = rank_flat + r;
    int a = n - r + 1;
    int chiM = invariants(M).chi;
    int s = ((a * r) % 2 == 0) ? 1 : legendre(static_cast<i64>(-1), M.ctx.p);
    return eps * chiM * s;
}

Report cancellation_check(const QuadLattice& Lflat, const QuadLattice& M, int eps, const OverlatticeLimits& lim) {
    if (!is_integral(M) || invariants(M).val != 0) throw Error("NotSelfDual", "M must be self-dual");
    Report R;
    R.name = "cancellation";
    int n = Lflat.rank() + M.rank();
    int e2 = cancellation_sign(Lflat.rank(), M, eps);
    R.note("eps_prime", std::to_string(e2));
    auto lhs_space = direct_sum(self_dual(Lflat.rank() + 1, e2, M.ctx), M);
    if (!(jordan_profile(lhs_space) == jordan_profile(self_dual(n + 1, eps, M.ctx))))
        R.fail("H^{eps'} + M is not isometric to H^eps");
    auto L = direct_sum(Lflat, M);
    Poly a = den_poly(L, eps, lim), b = den_poly(Lflat, e2, lim);
    if (a != b) R.fail("series differ: " + a.str() + " vs " + b.str());
    Q da = pden(L, eps, lim), db = pden(Lflat, e2, lim);
    if (da != db) R.fail("derivatives differ: " + to_string(da) + " vs " + to_string(db));
    return R;
}

Q whittaker_value(const QuadLattice& L, int eps, int k, const OverlatticeLimits& lim) {
    long q = L.ctx.p;
    Q x = qp(q, -k);
    return den_poly(L, eps, lim).eval(x) * nor_poly(L.rank(), eps, q).eval(x);
}

Q whittaker_derivative(const QuadLattice& L, int eps, const OverlatticeLimits& lim) {
    if (fe_sign(L, eps) != -1) throw Error("WrongSign", "derivative needs sign -1");
    return pden(L, eps, lim) * nor_poly(L.rank(), eps, L.ctx.p).eval(1);
}

}  // namespace siegel
