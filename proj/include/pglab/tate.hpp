#ifndef PGLAB_TATE_HPP
#define PGLAB_TATE_HPP

/// Evaluation of scalar Laurent series along the cyclotomic tower: the level-n
/// localization sending X to eps*exp(t/p^n) - 1 inside K_n[[t]], coefficient
/// extraction, the independently implemented group action on the target, and
/// the derivation intertwining check.

#include <string>

#include "pglab/cyclo.hpp"
#include "pglab/operators.hpp"
#include "pglab/series.hpp"

namespace pglab {

/// Power series in t with level-n cyclotomic coefficients; n_min < 0 records
/// a finite pole order in t.
using TateSeries = LaurentSeries<CycloElement>;

/// The image of X at level n: constant term eps - 1, then eps/(k! p^(nk)).
inline TateSeries tate_point(long p, long level, long t_order, long digits) {
    if (level < 1) throw std::domain_error("tate_point: level must be at least 1");
    CycloElement eps = CycloElement::zeta(p, level, digits);
    TateSeries s(CycloElement::zero(p, level), 0, t_order);
    s.set_coeff(0, cyclo_epsilon_minus_one(p, level, digits));
    mpz_class denom = 1;
    mpz_class pn = 1;
    for (long i = 0; i < level; ++i) pn *= p;
    for (long k = 1; k < t_order; ++k) {
        denom *= k;
        denom *= pn;
        s.set_coeff(k, eps.scale(mpq_class(mpz_class(1), denom)));
    }
    return s;
}

/// Evaluate f at the level-n point, truncated at t^t_order.  Poles of f are
/// carried through the inverse of the point, whose constant term eps - 1 is
/// invertible of positive valuation; the cost in precision is whatever the
/// coefficient arithmetic reports.
inline TateSeries iota_n(const ScalarSeries& f, long level, long t_order) {
    long p = f.zero_prototype().prime();
    long digits = detail::working_digits(f);
    long depth = 0;
    if (auto lo = f.first_meaningful_exponent(); lo && *lo < 0) depth = -*lo;
    TateSeries point = tate_point(p, level, t_order + depth + 2, digits);
    return s_subst_map(f, point, t_order, [&](const PadicNumber& c) {
        return CycloElement::from_scalar(p, level, c);
    });
}

/// The t^k coefficient.  Reading above the truncation window is a domain
/// error; reading below the stored pole part is the (known) zero.
inline CycloElement delta_coeff(const TateSeries& F, long k) { return F.coeff(k); }

/// The independently implemented action of a unit a on the target: the field
/// automorphism zeta -> zeta^a on coefficients together with t -> a*t.
inline TateSeries tate_gamma(const TateSeries& F, const mpz_class& a) {
    TateSeries r = F;
    for (long e = F.n_min(); e < F.support_end(); ++e) {
        mpz_class ak;
        mpz_pow_ui(ak.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(e >= 0 ? e : -e));
        mpq_class factor = e >= 0 ? mpq_class(ak) : mpq_class(mpz_class(1), ak);
        r.set_coeff(e, F.coeff(e).galois(a).scale(factor));
    }
    return r;
}

/// Coefficient-wise inclusion K_n -> K_m.
inline TateSeries tate_embed(const TateSeries& F, long m) {
    long p = F.zero_prototype().prime();
    TateSeries r(CycloElement::zero(p, m), F.n_min(), F.order());
    for (long e = F.n_min(); e < F.support_end(); ++e) r.set_coeff(e, F.coeff(e).embed(m));
    return r;
}

/// Report from comparing the two routes of the derivation intertwining
///   iota_n(partial f) = p^n * d/dt (iota_n f),
/// the normalization forced by differentiating f(eps*exp(t/p^n) - 1) in t.
struct IntertwineReport {
    long residual_floor = kInfValuation;  // min valuation of the difference
    long window = 0;                      // t-window of the comparison
    bool pass = false;
};

inline IntertwineReport check_intertwine(const ScalarSeries& f, long level, long t_order,
                                         long threshold) {
    long p = f.zero_prototype().prime();
    TateSeries lhs = iota_n(s_partial(f), level, t_order);
    mpz_class pn = 1;
    for (long i = 0; i < level; ++i) pn *= p;
    TateSeries rhs = iota_n(f, level, t_order + 1).derivative().scale(mpq_class(pn));
    IntertwineReport rep;
    rep.window = std::min(lhs.order(), rhs.order());
    rep.residual_floor = series_residual_floor(lhs, rhs);
    rep.pass = rep.residual_floor >= threshold;
    return rep;
}

/// Report from the two routes of coefficient extraction: the t^k coefficient
/// against 1/k! times the k-th t-derivative's constant term.
struct FactorialReport {
    CycloElement direct;
    CycloElement via_derivative;
    long residual_floor = kInfValuation;

    FactorialReport(const CycloElement& a, const CycloElement& b) : direct(a), via_derivative(b) {}
};

inline FactorialReport factorial_identity_check(const TateSeries& F, long k) {
    if (k < 0) throw std::domain_error("factorial_identity_check: negative index");
    CycloElement direct = delta_coeff(F, k);
    TateSeries d = F;
    mpz_class kfact = 1;
    for (long i = 1; i <= k; ++i) {
        d = d.derivative();
        kfact *= i;
    }
    CycloElement via = delta_coeff(d, 0).scale(mpq_class(mpz_class(1), kfact));
    FactorialReport rep(direct, via);
    CycloElement diff = direct.sub(via);
    rep.residual_floor = diff.is_zero() ? kInfValuation : diff.coeff_valuation_floor();
    return rep;
}

}  // namespace pglab

#endif  // PGLAB_TATE_HPP
