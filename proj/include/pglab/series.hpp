#ifndef PGLAB_SERIES_HPP
#define PGLAB_SERIES_HPP

/// Truncated Laurent series over a coefficient ring with tracked precision.
///
/// A series stores coefficients for the exponent window [n_min, order); the
/// element is known modulo O(X^order).  A series may instead be exact (order
/// = kExactOrder): then the stored support is the whole element, with no
/// unknown tail.  Ring operations compute the largest output window justified
/// by the operands: min of orders for sums, min of cross-shifted orders for
/// products.  Nothing is ever zero-padded past what an operand's window
/// supports, but an operation on exact inputs may be asked for any window.
///
/// The template works for any coefficient type exposing add/sub/neg/mul/inv/
/// is_zero/scale plus the three free functions coeff_provably_zero,
/// coeff_is_zero and coeff_valuation_floor (provided here for PadicNumber).

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "pglab/padic.hpp"

namespace pglab {

inline constexpr long kExactOrder = kInfValuation;

inline long order_add(long o, long s) { return o >= kExactOrder / 2 ? kExactOrder : o + s; }

inline bool coeff_provably_zero(const PadicNumber& a) { return a.is_exact_zero(); }
inline bool coeff_is_zero(const PadicNumber& a) { return a.is_zero(); }
inline long coeff_valuation_floor(const PadicNumber& a) { return a.valuation(); }

template <class C>
class LaurentSeries {
public:
    /// An exact zero series.
    explicit LaurentSeries(const C& zero_prototype)
        : zero_(zero_prototype), nmin_(0), order_(kExactOrder) {}

    /// A zero-filled window [n_min, order); order may be kExactOrder.
    LaurentSeries(const C& zero_prototype, long n_min, long order)
        : zero_(zero_prototype), nmin_(n_min), order_(order) {
        if (order != kExactOrder) {
            if (order < n_min) throw std::domain_error("LaurentSeries: empty window");
            coeffs_.assign(static_cast<std::size_t>(order - n_min), zero_);
        }
    }

    static LaurentSeries monomial(const C& zero_prototype, const C& c, long e) {
        LaurentSeries s(zero_prototype);
        s.set_coeff(e, c);
        return s;
    }

    const C& zero_prototype() const { return zero_; }
    long n_min() const { return nmin_; }
    long order() const { return order_; }
    bool is_exact() const { return order_ == kExactOrder; }

    /// Highest stored exponent + 1.
    long support_end() const { return nmin_ + static_cast<long>(coeffs_.size()); }

    const C& coeff(long e) const {
        if (e < nmin_) return zero_;
        if (e >= support_end()) {
            if (order_ != kExactOrder && e >= order_)
                throw std::domain_error("LaurentSeries: coefficient of X^" + std::to_string(e) +
                                        " lies beyond the truncation window");
            return zero_;
        }
        return coeffs_[static_cast<std::size_t>(e - nmin_)];
    }

    void set_coeff(long e, const C& c) {
        if (order_ != kExactOrder && e >= order_)
            throw std::domain_error("LaurentSeries: writing beyond the truncation window");
        if (coeffs_.empty()) {
            nmin_ = e;
            coeffs_.push_back(c);
            return;
        }
        if (e < nmin_) {
            coeffs_.insert(coeffs_.begin(), static_cast<std::size_t>(nmin_ - e), zero_);
            nmin_ = e;
        } else if (e >= support_end()) {
            coeffs_.resize(static_cast<std::size_t>(e - nmin_ + 1), zero_);
        }
        coeffs_[static_cast<std::size_t>(e - nmin_)] = c;
    }

    /// First exponent whose coefficient is not provably zero, if any.
    std::optional<long> first_meaningful_exponent() const {
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            if (!coeff_provably_zero(coeffs_[i])) return nmin_ + static_cast<long>(i);
        return std::nullopt;
    }

    /// First exponent whose coefficient is nonzero at working precision.
    std::optional<long> first_confident_exponent() const {
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            if (!coeff_is_zero(coeffs_[i])) return nmin_ + static_cast<long>(i);
        return std::nullopt;
    }

    bool is_zero() const { return !first_confident_exponent().has_value(); }

    /// Minimum coefficient valuation over the window (kInfValuation if all
    /// provably zero).  Zeros at working precision contribute their
    /// divisibility bound: they certify nothing beyond it.
    long valuation_floor() const {
        long m = kInfValuation;
        for (const auto& c : coeffs_)
            if (!coeff_provably_zero(c)) m = std::min(m, coeff_valuation_floor(c));
        return m;
    }

    LaurentSeries neg() const {
        LaurentSeries r = *this;
        for (auto& c : r.coeffs_) c = c.neg();
        return r;
    }

    LaurentSeries add(const LaurentSeries& o) const {
        long ord = std::min(order_, o.order_);
        long lo = std::min(nmin_, o.nmin_);
        long hi = ord == kExactOrder ? std::max(support_end(), o.support_end())
                                     : std::min(ord, std::max(support_end(), o.support_end()));
        LaurentSeries r(zero_, lo, ord);
        for (long e = lo; e < hi; ++e) {
            const C& a = e < support_end() && e >= nmin_ ? coeffs_[static_cast<std::size_t>(e - nmin_)] : zero_;
            const C& b = e < o.support_end() && e >= o.nmin_ ? o.coeffs_[static_cast<std::size_t>(e - o.nmin_)] : zero_;
            r.set_coeff(e, a.add(b));
        }
        return r;
    }

    LaurentSeries sub(const LaurentSeries& o) const { return add(o.neg()); }

    LaurentSeries shift(long k) const {
        LaurentSeries r = *this;
        r.nmin_ += k;
        r.order_ = order_add(order_, k);
        return r;
    }

    LaurentSeries scale_coeff(const C& a) const {
        LaurentSeries r = *this;
        for (auto& c : r.coeffs_) c = c.mul(a);
        return r;
    }

    LaurentSeries scale(const mpq_class& q) const {
        LaurentSeries r = *this;
        for (auto& c : r.coeffs_) c = c.scale(q);
        return r;
    }

    /// Product on the justified window: min(order_f + nmin_g, order_g + nmin_f),
    /// optionally truncated further by out_order.
    LaurentSeries mul(const LaurentSeries& o, long out_order = kExactOrder) const {
        long natural = std::min(order_add(order_, o.nmin_), order_add(o.order_, nmin_));
        long ord = std::min(natural, out_order);
        long lo = nmin_ + o.nmin_;
        if (ord != kExactOrder && ord < lo) ord = lo;  // empty product window
        LaurentSeries r(zero_, lo, ord);
        long hi = ord == kExactOrder ? support_end() + o.support_end() - 1 : ord;
        if (ord == kExactOrder) {
            if (coeffs_.empty() || o.coeffs_.empty()) return LaurentSeries(zero_);
            r = LaurentSeries(zero_, lo, kExactOrder);
        }
        std::vector<C> acc(static_cast<std::size_t>(std::max<long>(hi - lo, 0)), zero_);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeff_provably_zero(coeffs_[i])) continue;
            long ei = nmin_ + static_cast<long>(i);
            for (std::size_t j = 0; j < o.coeffs_.size(); ++j) {
                long e = ei + o.nmin_ + static_cast<long>(j);
                if (e >= hi) break;
                if (coeff_provably_zero(o.coeffs_[j])) continue;
                std::size_t k = static_cast<std::size_t>(e - lo);
                acc[k] = acc[k].add(coeffs_[i].mul(o.coeffs_[j]));
            }
        }
        for (long e = lo; e < hi; ++e) r.set_coeff(e, acc[static_cast<std::size_t>(e - lo)]);
        r.trim();
        return r;
    }

    /// d/dX.
    LaurentSeries derivative() const {
        LaurentSeries r(zero_, nmin_ - 1, order_add(order_, -1));
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            long e = nmin_ + static_cast<long>(i);
            if (e == 0 || coeff_provably_zero(coeffs_[i])) continue;
            if (r.order_ != kExactOrder && e - 1 >= r.order_) continue;
            r.set_coeff(e - 1, coeffs_[i].scale(mpq_class(e)));
        }
        return r;
    }

    /// Restrict knowledge to O(X^order).
    LaurentSeries truncate(long ord) const {
        if (ord >= order_) return *this;
        if (ord <= nmin_) return LaurentSeries(zero_, ord, ord);
        LaurentSeries r(zero_, nmin_, ord);
        for (long e = nmin_; e < ord; ++e)
            if (e < support_end()) r.set_coeff(e, coeff(e));
        return r;
    }

    /// Drop exponents below lo (callers assert they are zero at precision).
    LaurentSeries restrict_above(long lo) const {
        if (lo <= nmin_) return *this;
        LaurentSeries r(zero_, lo, order_);
        for (long e = lo; e < support_end(); ++e) r.set_coeff(e, coeff(e));
        return r;
    }

    /// Drop provably-zero margins of the stored support.
    void trim() {
        std::size_t a = 0;
        while (a < coeffs_.size() && coeff_provably_zero(coeffs_[a])) ++a;
        std::size_t b = coeffs_.size();
        // The top margin may only be trimmed for exact series: a finite window
        // records knowledge, not support.
        if (order_ == kExactOrder)
            while (b > a && coeff_provably_zero(coeffs_[b - 1])) --b;
        if (a == 0 && b == coeffs_.size()) return;
        std::vector<C> kept(coeffs_.begin() + static_cast<long>(a), coeffs_.begin() + static_cast<long>(b));
        nmin_ += static_cast<long>(a);
        coeffs_ = std::move(kept);
        if (coeffs_.empty()) nmin_ = 0;
    }

    /// Multiplicative inverse.  The element is written X^d * u * (1 + h) with
    /// u the first coefficient that is nonzero at working precision and h
    /// supported in positive exponents; the geometric series for (1+h)^-1
    /// terminates X-adically inside the window.
    LaurentSeries invert(long out_order = -1) const {
        long d = 0;
        const C* pivot = nullptr;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeff_provably_zero(coeffs_[i])) continue;
            if (coeff_is_zero(coeffs_[i]))
                throw std::domain_error(
                    "LaurentSeries: leading coefficient at X^" +
                    std::to_string(nmin_ + static_cast<long>(i)) +
                    " is zero at working precision; inverse undefined there");
            d = nmin_ + static_cast<long>(i);
            pivot = &coeffs_[i];
            break;
        }
        if (!pivot) throw std::domain_error("LaurentSeries: inverse of zero at working precision");
        long natural = order_ == kExactOrder
                           ? (support_end() - d == 1 ? kExactOrder : -1)
                           : order_ - 2 * d;
        long ord = out_order >= 0 ? out_order : natural;
        if (ord < 0)
            throw std::domain_error("LaurentSeries: inverse of an exact series needs an explicit order");
        if (order_ != kExactOrder && out_order >= 0) ord = std::min(ord, natural);
        C uinv = pivot->inv();
        if (ord == kExactOrder) {
            // Monomial: exact inverse.
            return monomial(zero_, uinv, -d);
        }
        // h = f / (u X^d) - 1, supported in exponents >= 1.
        long hwin = std::max<long>(ord + d, 1);  // the geometric sum lives at exponents [0, ord + d)
        LaurentSeries h(zero_, 1, hwin);
        for (long e = d + 1; e < std::min(support_end(), order_add(order_, 0)); ++e) {
            if (e - d >= hwin) break;
            h.set_coeff(e - d, coeff(e).mul(uinv));
        }
        h.trim();
        LaurentSeries acc(zero_, 0, hwin);
        C one_c = pivot->mul(uinv);
        acc.set_coeff(0, one_c);
        LaurentSeries hk = h;
        long sign = -1;
        while (!hk.coeffs_.empty() && hk.first_meaningful_exponent().has_value()) {
            acc = sign < 0 ? acc.sub(hk) : acc.add(hk);
            if (hk.nmin_ >= hwin - 1) break;
            hk = hk.mul(h, hwin);
            sign = -sign;
        }
        return acc.scale_coeff(uinv).shift(-d).truncate(ord);
    }

    std::string to_string(const std::string& var = "X") const {
        std::string s;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeff_is_zero(coeffs_[i])) continue;
            if (!s.empty()) s += " + ";
            s += "(" + coeffs_[i].to_string() + ")*" + var + "^" +
                 std::to_string(nmin_ + static_cast<long>(i));
        }
        if (s.empty()) s = "0";
        if (order_ != kExactOrder) s += " + O(" + var + "^" + std::to_string(order_) + ")";
        return s;
    }

private:
    C zero_;
    long nmin_;
    long order_;
    std::vector<C> coeffs_;
};

using ScalarSeries = LaurentSeries<PadicNumber>;

inline ScalarSeries scalar_series(long p, long n_min, long order) {
    return ScalarSeries(PadicNumber::zero(p), n_min, order);
}

inline ScalarSeries scalar_exact(long p) { return ScalarSeries(PadicNumber::zero(p)); }

/// The variable X as an exact series.
inline ScalarSeries series_x(long p, long digits) {
    return ScalarSeries::monomial(PadicNumber::zero(p), PadicNumber::one(p, digits), 1);
}

inline ScalarSeries series_const(long p, const PadicNumber& c) {
    return ScalarSeries::monomial(PadicNumber::zero(p), c, 0);
}

/// log(1 + X) truncated at the given order.
inline ScalarSeries s_log_oneplus(long p, long order, long digits) {
    ScalarSeries t(PadicNumber::zero(p), 1, order);
    for (long k = 1; k < order; ++k)
        t.set_coeff(k, PadicNumber::from_rational(p, mpq_class(k % 2 ? 1 : -1, k), digits));
    return t;
}

namespace detail {

/// Largest relative precision present in a scalar series (fallback 24).
inline long working_digits(const ScalarSeries& f) {
    long d = 0;
    for (long e = f.n_min(); e < f.support_end(); ++e) d = std::max(d, f.coeff(e).digits());
    return d > 0 ? d : 24;
}

}  // namespace detail

/// Substitute X -> y into f, mapping each scalar coefficient through embed
/// into y's coefficient ring.  y must be invertible wherever f has poles.
template <class C, class Embed>
LaurentSeries<C> s_subst_map(const ScalarSeries& f, const LaurentSeries<C>& y, long out_order,
                             Embed embed) {
    long depth = 0;
    if (auto lo = f.first_meaningful_exponent(); lo && *lo < 0) depth = -*lo;
    if (depth > 0 && out_order == kExactOrder)
        throw std::domain_error("s_subst_map: a pole under substitution needs a finite output order");
    const C& czero = y.zero_prototype();
    auto term = [&](const PadicNumber& c) { return LaurentSeries<C>::monomial(czero, embed(c), 0); };
    LaurentSeries<C> acc(czero);
    bool started = false;
    long top = f.is_exact() ? f.support_end() - 1 : f.order() - 1;
    for (long e = top; e >= 0; --e) {
        if (started) acc = acc.mul(y, out_order);
        acc = acc.add(term(f.coeff(e)));
        started = true;
    }
    if (depth > 0) {
        LaurentSeries<C> yinv = y.invert(out_order + depth);
        LaurentSeries<C> neg(czero);
        bool nstarted = false;
        for (long j = depth; j >= 1; --j) {
            if (nstarted) neg = neg.mul(yinv, out_order + j);
            neg = neg.add(term(f.coeff(-j)));
            nstarted = true;
        }
        if (nstarted) neg = neg.mul(yinv, out_order);
        acc = started ? acc.add(neg) : neg;
    }
    if (!started && depth == 0) return LaurentSeries<C>(czero);
    return acc.truncate(out_order);
}

/// Substitute X -> y where y = (1+X)^a - 1 has been precomputed; y must have
/// support in positive exponents with an invertible leading coefficient.
inline ScalarSeries s_subst_core(const ScalarSeries& f, const ScalarSeries& y, long out_order) {
    return s_subst_map(f, y, out_order, [](const PadicNumber& c) { return c; });
}

/// (1+X)^a - 1 for an exact integer a, to the requested window.
inline ScalarSeries s_onepluspow_exact(long p, const mpz_class& a, long order, long digits) {
    bool finite_poly = a >= 0 && a < order;
    long top = finite_poly ? static_cast<long>(mpz_get_ui(mpz_class(a).get_mpz_t())) : order - 1;
    ScalarSeries y = finite_poly ? scalar_exact(p) : scalar_series(p, 1, order);
    for (long k = 1; k <= top; ++k) {
        mpz_class b;
        mpz_bin_ui(b.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(k));
        if (b == 0) continue;
        y.set_coeff(k, PadicNumber::from_integer(p, b, digits));
    }
    return y;
}

/// (1+X)^a - 1 for a p-adic exponent, to the requested window.
inline ScalarSeries s_onepluspow(long p, const PadicNumber& a, long order, long digits) {
    ScalarSeries y = scalar_series(p, 1, order);
    for (long k = 1; k < order; ++k) y.set_coeff(k, binom_zp(a, k));
    return y;
}

/// f((1+X)^a - 1) for exact integer a.  For a >= 0 and exact f the result is
/// exact; otherwise out_order must be resolvable.
inline ScalarSeries s_subst_oneplus(const ScalarSeries& f, const mpz_class& a, long out_order = -1) {
    long p = f.zero_prototype().prime();
    long digits = detail::working_digits(f);
    bool neg_part = f.first_meaningful_exponent() && *f.first_meaningful_exponent() < 0;
    if (out_order < 0) {
        if (!f.is_exact()) {
            // The unknown tail X^M maps to terms of exponent >= M: same window.
            out_order = f.order();
        } else if (a >= 0 && !neg_part && a < 512) {
            out_order = kExactOrder;  // polynomial image of a polynomial
        } else {
            throw std::domain_error("s_subst_oneplus: output order required for this input");
        }
    }
    if (!f.is_exact()) out_order = std::min(out_order, f.order());
    long depth = 0;
    if (auto lo = f.first_meaningful_exponent(); lo && *lo < 0) depth = -*lo;
    ScalarSeries y = s_onepluspow_exact(p, a, order_add(out_order, depth + 2), digits);
    return s_subst_core(f, y, out_order);
}

/// f((1+X)^a - 1) for a p-adic unit exponent.
inline ScalarSeries s_subst_oneplus(const ScalarSeries& f, const PadicNumber& a, long out_order = -1) {
    long p = f.zero_prototype().prime();
    long digits = detail::working_digits(f);
    if (a.valuation() != 0)
        throw std::domain_error("s_subst_oneplus: exponent must be a unit (or use the exact overload)");
    if (out_order < 0) {
        if (f.is_exact())
            throw std::domain_error("s_subst_oneplus: output order required for exact input");
        out_order = f.order();
    }
    if (!f.is_exact()) out_order = std::min(out_order, f.order());
    long depth = 0;
    if (auto lo = f.first_meaningful_exponent(); lo && *lo < 0) depth = -*lo;
    ScalarSeries y = s_onepluspow(p, a, out_order + depth + 2, digits);
    return s_subst_core(f, y, out_order);
}

/// (1+X) d/dX.
template <class C>
LaurentSeries<C> s_partial(const LaurentSeries<C>& f) {
    auto d = f.derivative();
    return d.add(d.shift(1));
}

/// t * (1+X) d/dX with t = log(1+X) computed to a compatible window.
inline ScalarSeries s_nabla(const ScalarSeries& f, long t_order = -1) {
    long p = f.zero_prototype().prime();
    long digits = detail::working_digits(f);
    if (t_order < 0) {
        if (f.is_exact())
            t_order = std::max<long>(f.support_end() - f.n_min(), 1) + 32;
        else
            t_order = f.order() - f.n_min() + 1;
    }
    ScalarSeries t = s_log_oneplus(p, t_order, digits);
    return t.mul(s_partial(f));
}

/// Division by t = log(1+X).  Succeeds iff the first coefficient of f that is
/// nonzero at working precision sits at a positive exponent; the quotient is
/// then computed through the unit part of t.  Failure reports the obstructing
/// exponent instead of throwing: non-divisibility is an answer, not an error.
struct TDivision {
    bool ok = false;
    ScalarSeries quotient;
    long obstruction = 0;  // exponent of the first obstructing coefficient

    explicit TDivision(const ScalarSeries& q) : quotient(q) {}
};

inline TDivision s_tdivide(const ScalarSeries& f) {
    long p = f.zero_prototype().prime();
    long digits = detail::working_digits(f);
    auto lead = f.first_confident_exponent();
    if (lead && *lead <= 0) {
        TDivision r(scalar_exact(p));
        r.ok = false;
        r.obstruction = *lead;
        return r;
    }
    if (!lead) {
        // Zero at working precision: t divides it trivially within precision.
        TDivision r(scalar_exact(p));
        r.ok = true;
        return r;
    }
    long w = f.is_exact() ? f.support_end() + 1 : f.order();
    ScalarSeries unit_t = s_log_oneplus(p, w + 1, digits).shift(-1);  // t / X
    ScalarSeries f1 = f.restrict_above(1);
    TDivision r(f1.shift(-1).mul(unit_t.invert(w)));
    r.ok = true;
    return r;
}

/// Smallest valuation across the coefficients of f - g on the common window;
/// kInfValuation when the two agree exactly there.
template <class C>
long series_residual_floor(const LaurentSeries<C>& f, const LaurentSeries<C>& g) {
    return f.sub(g).valuation_floor();
}

}  // namespace pglab

#endif  // PGLAB_SERIES_HPP
