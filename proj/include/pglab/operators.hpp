#ifndef PGLAB_OPERATORS_HPP
#define PGLAB_OPERATORS_HPP

/// The semilinear operator calculus on scalar Laurent series: the p-power
/// substitution, the unit-exponent substitutions forming a group, the left
/// inverse of the p-power substitution computed by two independent
/// algorithms, and a finite-difference probe for the logarithmic derivation.

#include <optional>
#include <vector>

#include "pglab/cyclo.hpp"
#include "pglab/series.hpp"

namespace pglab {

/// A unit exponent a acting by X -> (1+X)^a - 1.  For p = 2 the unit must be
/// congruent to 1 mod 4 so that the binomial coefficients stay integral and
/// the action stays in the standard group.
class GammaElement {
public:
    GammaElement(long p, const mpz_class& a, long digits)
        : a_(PadicNumber::from_integer(p, a, digits)), exact_(a) {
        validate();
    }

    explicit GammaElement(const PadicNumber& a) : a_(a) { validate(); }

    long prime() const { return a_.prime(); }
    const PadicNumber& value() const { return a_; }
    const std::optional<mpz_class>& exact_value() const { return exact_; }

    GammaElement inverse() const { return GammaElement(a_.inv()); }

    GammaElement compose(const GammaElement& o) const {
        if (exact_ && o.exact_) return GammaElement(prime(), *exact_ * *o.exact_, a_.digits());
        return GammaElement(a_.mul(o.a_));
    }

private:
    void validate() const {
        if (a_.is_zero() || a_.valuation() != 0)
            throw std::domain_error("GammaElement: exponent must be a unit");
        if (a_.prime() == 2) {
            if (a_.digits() < 2 || mpz_class(a_.representative() % 4) != 1)
                throw std::domain_error("GammaElement: p = 2 exponent must be 1 mod 4");
        }
    }

    PadicNumber a_;
    std::optional<mpz_class> exact_;
};

/// X -> (1+X)^p - 1.  Exact polynomial output for exact polynomial input.
inline ScalarSeries op_phi(const ScalarSeries& f, long out_order = -1) {
    return s_subst_oneplus(f, mpz_class(f.zero_prototype().prime()), out_order);
}

/// The exact base polynomial (1+X)^p - 1.
inline ScalarSeries phi_of_x(long p, long digits) {
    return s_onepluspow_exact(p, mpz_class(p), p + 2, digits);
}

inline ScalarSeries op_gamma(const ScalarSeries& f, const GammaElement& g, long out_order = -1) {
    if (g.exact_value()) return s_subst_oneplus(f, *g.exact_value(), out_order);
    return s_subst_oneplus(f, g.value(), out_order);
}

namespace detail {

/// Output window claim for a left-inverse of the p-power substitution applied
/// to a series known mod X^M: the image is claimed mod X^ceil(M/p).
inline long psi_out_order(const ScalarSeries& f) {
    if (f.is_exact()) return kExactOrder;
    long p = f.zero_prototype().prime();
    long m = f.order();
    return m >= 0 ? (m + p - 1) / p : -((-m) / p);
}

inline long div_ceil(long a, long b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

/// A tail term c X^m beyond a truncation feeds coefficient j of the image
/// under the left inverse of the p-power substitution with valuation at
/// least v(c) + ceil((m - p j)/(p-1)) - 1, and the bound is attained.  Every
/// coefficient of the computed image must forget digits beyond what the
/// input window justifies.
inline long psi_tail_cap(long w, long v0, long p, long j) {
    return v0 + div_ceil(w - p * j, p - 1) - 1;
}

inline mpq_class signed_binom(unsigned long m, unsigned long e, bool alternate) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), m, e);
    if (alternate && ((m - e) & 1UL)) b = -b;
    return mpq_class(b);
}

}  // namespace detail

/// Left inverse of op_phi, computed by coefficient matching in the shifted
/// power basis where the p-power substitution acts monomially: express the
/// stored polynomial in powers of 1+X, keep exponents divisible by p, and
/// rewrite the result in powers of X.  Poles are first cleared by
/// multiplying with (1+X)^p - 1 per pole order, using the projection rule
/// that moves that factor across as a power of X.
inline ScalarSeries op_psi(const ScalarSeries& f) {
    long p = f.zero_prototype().prime();
    long digits = detail::working_digits(f);
    long out_ord = detail::psi_out_order(f);
    auto lo = f.first_meaningful_exponent();
    if (!lo) {
        if (f.is_exact()) return scalar_exact(p);
        ScalarSeries z = scalar_series(p, 0, std::max<long>(out_ord, 0));
        for (long j = 0; j < z.order(); ++j)
            z.set_coeff(j, PadicNumber::zero(p).cap_abs_precision(
                                detail::psi_tail_cap(f.order(), 0, p, j)));
        return z;
    }
    long d = *lo < 0 ? -*lo : 0;
    ScalarSeries g = f;
    if (d > 0) {
        ScalarSeries base = phi_of_x(p, digits);
        for (long i = 0; i < d; ++i) g = g.mul(base);
    }
    if (auto glo = g.first_meaningful_exponent(); glo && *glo < 0)
        throw std::domain_error("op_psi: pole clearing left a negative exponent");
    long top = g.support_end() - 1;
    if (top < 0) top = 0;
    PadicNumber zp = PadicNumber::zero(p);
    std::vector<PadicNumber> ghat(static_cast<std::size_t>(top + 1), zp);
    for (long e = 0; e <= top; ++e) {
        PadicNumber acc = zp;
        for (long m = e; m <= top; ++m) {
            const PadicNumber& c = g.coeff(m);
            if (coeff_provably_zero(c)) continue;
            acc = acc.add(c.scale(detail::signed_binom(static_cast<unsigned long>(m),
                                                       static_cast<unsigned long>(e), true)));
        }
        ghat[static_cast<std::size_t>(e)] = acc;
    }
    long wtop = top / p;
    ScalarSeries y0 = scalar_exact(p);
    for (long j = 0; j <= wtop; ++j) {
        PadicNumber acc = zp;
        for (long w = j; w <= wtop; ++w)
            acc = acc.add(ghat[static_cast<std::size_t>(p * w)].scale(
                detail::signed_binom(static_cast<unsigned long>(w), static_cast<unsigned long>(j), false)));
        if (!coeff_provably_zero(acc)) y0.set_coeff(j, acc);
    }
    ScalarSeries x0 = y0.shift(-d);
    if (out_ord != kExactOrder) {
        x0 = x0.truncate(out_ord);
        // The matching ran on the visible window of the pole-cleared input;
        // its unseen tail caps what each output coefficient can claim.
        long v0 = std::min(g.valuation_floor(), 0L);
        for (long e = x0.n_min(); e < out_ord; ++e)
            x0.set_coeff(e, x0.coeff(e).cap_abs_precision(
                                 detail::psi_tail_cap(g.order(), v0, p, e + d)));
    }
    return x0;
}

/// Result of the averaging route: the value plus the smallest valuation seen
/// on coefficients that the descent requires to vanish (kInfValuation when
/// they all vanish exactly).
struct PsiTraceResult {
    ScalarSeries value;
    long offimage_floor = kInfValuation;

    explicit PsiTraceResult(const ScalarSeries& v) : value(v) {}
};

namespace detail {

/// f(beta + alpha X) over the level-1 cyclotomic field, truncated at order w.
inline LaurentSeries<CycloElement> affine_image(const ScalarSeries& f, const CycloElement& alpha,
                                                const CycloElement& beta, long w) {
    long p = alpha.prime();
    CycloElement czero = CycloElement::zero(p, 1);
    LaurentSeries<CycloElement> y(czero);
    if (!coeff_provably_zero(beta)) y.set_coeff(0, beta);
    y.set_coeff(1, alpha);
    return s_subst_map(f, y, w,
                       [&](const PadicNumber& c) { return CycloElement::from_scalar(p, 1, c); });
}

}  // namespace detail

/// Left inverse of op_phi computed independently as the normalized average of
/// f over the twists X -> zeta(1+X) - 1 for all p-th roots of unity zeta,
/// followed by descent to the base and removal of the p-power substitution.
inline PsiTraceResult op_psi_trace(const ScalarSeries& f) {
    long p = f.zero_prototype().prime();
    long digits = detail::working_digits(f);
    long out_ord = detail::psi_out_order(f);
    auto lo = f.first_meaningful_exponent();
    if (!lo) {
        if (f.is_exact()) return PsiTraceResult(scalar_exact(p));
        ScalarSeries z = scalar_series(p, 0, std::max<long>(out_ord, 0));
        for (long j = 0; j < z.order(); ++j)
            z.set_coeff(j, PadicNumber::zero(p).cap_abs_precision(
                                detail::psi_tail_cap(f.order(), 0, p, j)));
        return PsiTraceResult(z);
    }
    long d = *lo < 0 ? -*lo : 0;
    long top = std::max<long>(f.support_end() - 1, 0);
    // After clearing d pole orders the descended image is a polynomial of
    // degree up to top + p*d; its product form needs the average known to
    // top + (p-1)*d, one past for the exclusive bound.
    long wb = top + (p - 1) * d + 1;
    CycloElement czero = CycloElement::zero(p, 1);
    CycloElement one_c = CycloElement::one(p, 1, digits);
    CycloElement zeta = CycloElement::zeta(p, 1, digits);

    LaurentSeries<CycloElement> total(czero);
    {
        // The identity twist is f itself.
        LaurentSeries<CycloElement> branch(czero, f.n_min(), wb);
        for (long e = f.n_min(); e < std::min(f.support_end(), wb); ++e)
            branch.set_coeff(e, CycloElement::from_scalar(p, 1, f.coeff(e)));
        total = branch;
    }
    CycloElement alpha = one_c;
    for (long c = 1; c < p; ++c) {
        alpha = alpha.mul(zeta);
        CycloElement beta = alpha.sub(one_c);
        total = total.add(detail::affine_image(f, alpha, beta, wb));
    }
    total = total.scale(mpq_class(1, p));

    // Descend coefficient-wise to the base field.
    long offimage = kInfValuation;
    ScalarSeries base_img = scalar_series(p, total.n_min(), wb);
    for (long e = total.n_min(); e < wb; ++e) {
        const CycloElement& ce = total.coeff(e);
        PadicNumber head = ce.coeff(0);
        for (long j = 1; j < ce.degree(); ++j)
            if (!ce.coeff(j).is_zero()) offimage = std::min(offimage, ce.coeff(j).valuation());
        base_img.set_coeff(e, head);
    }

    // base_img is the p-power image of the answer; clear its poles with the
    // base polynomial and undo the monomial action in the shifted basis.
    ScalarSeries h = base_img;
    if (d > 0) {
        ScalarSeries basepoly = phi_of_x(p, digits);
        for (long i = 0; i < d; ++i) h = h.mul(basepoly);
        for (long e = h.n_min(); e < 0; ++e)
            if (!h.coeff(e).is_zero()) offimage = std::min(offimage, h.coeff(e).valuation());
        h = h.restrict_above(0);
    }
    long htop = std::min<long>(h.support_end(), h.order()) - 1;
    PadicNumber zp = PadicNumber::zero(p);
    std::vector<PadicNumber> hhat(static_cast<std::size_t>(std::max<long>(htop + 1, 0)), zp);
    for (long e = 0; e <= htop; ++e) {
        PadicNumber acc = zp;
        for (long m = e; m <= htop; ++m) {
            const PadicNumber& c = h.coeff(m);
            if (coeff_provably_zero(c)) continue;
            acc = acc.add(c.scale(detail::signed_binom(static_cast<unsigned long>(m),
                                                       static_cast<unsigned long>(e), true)));
        }
        hhat[static_cast<std::size_t>(e)] = acc;
    }
    for (long e = 0; e <= htop; ++e) {
        if (e % p == 0) continue;
        const PadicNumber& c = hhat[static_cast<std::size_t>(e)];
        if (!c.is_zero()) offimage = std::min(offimage, c.valuation());
    }
    long wtop = htop / p;
    ScalarSeries y0 = scalar_exact(p);
    for (long j = 0; j <= wtop; ++j) {
        PadicNumber acc = zp;
        for (long w = j; w <= wtop; ++w)
            acc = acc.add(hhat[static_cast<std::size_t>(p * w)].scale(
                detail::signed_binom(static_cast<unsigned long>(w), static_cast<unsigned long>(j), false)));
        if (!coeff_provably_zero(acc)) y0.set_coeff(j, acc);
    }
    ScalarSeries x0 = y0.shift(-d);
    if (out_ord != kExactOrder) {
        x0 = x0.truncate(out_ord);
        // The averaging saw the input only through its truncation window;
        // the unseen tail caps what each output coefficient can claim.
        long v0 = std::min(f.valuation_floor(), 0L);
        for (long e = x0.n_min(); e < out_ord; ++e)
            x0.set_coeff(e, x0.coeff(e).cap_abs_precision(
                                 detail::psi_tail_cap(f.order(), v0, p, e + d)));
    }
    PsiTraceResult r(x0);
    r.offimage_floor = offimage;
    return r;
}

/// Finite-difference probe for t (1+X) d/dX: apply the unit exponent 1 + p^k
/// and divide by its logarithm.  Agreement with the closed form improves
/// linearly in k.
inline ScalarSeries op_nabla_fd(const ScalarSeries& f, long k, long out_order) {
    long p = f.zero_prototype().prime();
    long digits = detail::working_digits(f);
    if (k < (p == 2 ? 2 : 1)) throw std::domain_error("op_nabla_fd: step exponent too small");
    mpz_class step = 1;
    for (long i = 0; i < k; ++i) step *= p;
    GammaElement g(p, 1 + step, digits);
    ScalarSeries num = op_gamma(f, g, out_order).sub(f.truncate(out_order));
    PadicNumber logstep = padic_log1p(PadicNumber::from_integer(p, step, digits));
    return num.scale_coeff(logstep.inv());
}

}  // namespace pglab

#endif  // PGLAB_OPERATORS_HPP
