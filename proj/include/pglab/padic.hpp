#ifndef PGLAB_PADIC_HPP
#define PGLAB_PADIC_HPP

/// p-adic scalars with tracked relative precision.
///
/// A nonzero value is stored as p^v * u where u is a unit residue modulo
/// p^N (0 < u < p^N, p does not divide u) and N is the number of significant
/// base-p digits: the value is known modulo p^(v+N).  Two degenerate states
/// are kept distinct from every nonzero value:
///
///   * the exact zero, whose valuation is +infinity, and
///   * an inexact zero O(p^m): a value whose digits all vanished at the
///     working precision, known only to be divisible by p^m.
///
/// Arithmetic never invents digits: sums are reduced modulo the smaller
/// absolute precision of the operands, products keep the smaller relative
/// precision.  Multiplication or addition by exact integers and rationals
/// (denominators prime to nothing in particular; any rational works) is
/// exempt from the minimum rule since an exact scalar has no uncertainty.

#include <gmpxx.h>

#include <limits>
#include <stdexcept>
#include <string>

namespace pglab {

/// Raised when a requested result is not determined at the working precision.
class precision_error : public std::runtime_error {
public:
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

/// Sentinel valuation for the exact zero.
inline constexpr long kInfValuation = std::numeric_limits<long>::max() / 4;

namespace detail {

inline mpz_class pow_ui(long p, long n) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(n));
    return r;
}

/// Largest e with p^e | z, together with z / p^e.  z must be nonzero.
inline long remove_p(mpz_class& z, long p) {
    mpz_class pz(p);
    mpz_class q;
    unsigned long e = mpz_remove(q.get_mpz_t(), z.get_mpz_t(), pz.get_mpz_t());
    z = q;
    return static_cast<long>(e);
}

}  // namespace detail

class PadicNumber {
public:
    PadicNumber() : p_(2), v_(0), u_(0), n_(0), exact_zero_(true) {}

    /// The exact zero of Q_p.
    static PadicNumber zero(long p) {
        PadicNumber x;
        x.p_ = check_prime(p);
        return x;
    }

    /// An inexact zero O(p^m): all digits below p^m are known to vanish.
    static PadicNumber o_term(long p, long m) {
        PadicNumber x;
        x.p_ = check_prime(p);
        x.exact_zero_ = false;
        x.v_ = m;
        x.u_ = 0;
        x.n_ = 0;
        return x;
    }

    /// Raw constructor from valuation and unit digits.
    static PadicNumber make(long p, long v, const mpz_class& unit, long digits) {
        check_prime(p);
        if (digits <= 0) throw std::domain_error("PadicNumber: digit count must be positive");
        mpz_class u = unit % detail::pow_ui(p, digits);
        if (u < 0) u += detail::pow_ui(p, digits);
        if (u == 0) throw std::domain_error("PadicNumber: unit part must be nonzero");
        if (mpz_divisible_ui_p(u.get_mpz_t(), static_cast<unsigned long>(p)))
            throw std::domain_error("PadicNumber: unit part must be coprime to p");
        PadicNumber x;
        x.p_ = p;
        x.exact_zero_ = false;
        x.v_ = v;
        x.u_ = u;
        x.n_ = digits;
        return x;
    }

    /// Embed an exact integer at the given relative precision.
    static PadicNumber from_integer(long p, const mpz_class& z, long digits) {
        check_prime(p);
        if (z == 0) return zero(p);
        mpz_class u = z;
        long v = detail::remove_p(u, p);
        return make(p, v, u, digits);
    }

    static PadicNumber from_integer(long p, long z, long digits) {
        return from_integer(p, mpz_class(z), digits);
    }

    /// Embed an exact rational at the given relative precision.
    static PadicNumber from_rational(long p, const mpq_class& q, long digits) {
        check_prime(p);
        if (q == 0) return zero(p);
        mpz_class num = q.get_num(), den = q.get_den();
        long v = detail::remove_p(num, p) - detail::remove_p(den, p);
        mpz_class mod = detail::pow_ui(p, digits);
        mpz_class deninv;
        if (!mpz_invert(deninv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t()))
            throw std::domain_error("PadicNumber: denominator not invertible mod p^N");
        return make(p, v, num * deninv, digits);
    }

    static PadicNumber from_rational(long p, long num, long den, long digits) {
        return from_rational(p, mpq_class(num, den), digits);
    }

    static PadicNumber one(long p, long digits) { return from_integer(p, 1, digits); }

    long prime() const { return p_; }
    bool is_exact_zero() const { return exact_zero_; }
    bool is_inexact_zero() const { return !exact_zero_ && u_ == 0; }

    /// True when the value is indistinguishable from zero at its precision.
    bool is_zero() const { return exact_zero_ || u_ == 0; }
    bool is_regular() const { return !is_zero(); }

    /// Valuation of a regular value; for an inexact zero, the divisibility
    /// bound; kInfValuation for the exact zero.  Always a lower bound on the
    /// true valuation.
    long valuation() const {
        if (exact_zero_) return kInfValuation;
        return v_;
    }

    /// The value is known modulo p^abs_precision().
    long abs_precision() const {
        if (exact_zero_) return kInfValuation;
        return v_ + n_;
    }

    /// Significant base-p digits (0 for zeros).
    long digits() const { return exact_zero_ ? 0 : n_; }

    const mpz_class& unit_part() const { return u_; }

    /// Canonical integer representative of p^v * u (regular values only).
    mpz_class representative() const {
        if (is_zero()) return 0;
        if (v_ < 0) throw std::domain_error("PadicNumber: representative of a value with a pole");
        return detail::pow_ui(p_, v_) * u_;
    }

    PadicNumber neg() const {
        if (is_zero()) return *this;
        PadicNumber r = *this;
        r.u_ = detail::pow_ui(p_, n_) - u_;
        return r;
    }

    PadicNumber add(const PadicNumber& o) const {
        require_same_prime(o);
        if (exact_zero_) return o;
        if (o.exact_zero_) return *this;
        long m = std::min(abs_precision(), o.abs_precision());
        // Exact sum of the two representatives, scaled by p^base.
        long base = std::min(is_inexact_zero() ? m : v_, o.is_inexact_zero() ? m : o.v_);
        mpz_class s = 0;
        if (!is_inexact_zero()) s += detail::pow_ui(p_, v_ - base) * u_;
        if (!o.is_inexact_zero()) s += detail::pow_ui(p_, o.v_ - base) * o.u_;
        return canonicalize(p_, base, s, m);
    }

    PadicNumber sub(const PadicNumber& o) const { return add(o.neg()); }

    PadicNumber mul(const PadicNumber& o) const {
        require_same_prime(o);
        if (exact_zero_ || o.exact_zero_) return zero(p_);
        if (is_inexact_zero() || o.is_inexact_zero()) {
            // |x*y| <= p^-(bound_x + v_y); an inexact zero contributes its bound.
            return o_term(p_, v_ + o.v_);
        }
        long n = std::min(n_, o.n_);
        PadicNumber r;
        r.p_ = p_;
        r.exact_zero_ = false;
        r.v_ = v_ + o.v_;
        r.n_ = n;
        r.u_ = (u_ * o.u_) % detail::pow_ui(p_, n);
        return r;
    }

    PadicNumber inv() const {
        if (exact_zero_) throw std::domain_error("PadicNumber: inverse of exact zero");
        if (is_inexact_zero())
            throw precision_error("PadicNumber: cannot invert O(p^" + std::to_string(v_) +
                                  "), value is zero at working precision");
        PadicNumber r = *this;
        r.v_ = -v_;
        mpz_class mod = detail::pow_ui(p_, n_);
        mpz_invert(r.u_.get_mpz_t(), u_.get_mpz_t(), mod.get_mpz_t());
        return r;
    }

    PadicNumber div(const PadicNumber& o) const { return mul(o.inv()); }

    /// Multiply by an exact rational; relative precision is preserved.
    PadicNumber scale(const mpq_class& q) const {
        if (q == 0) return zero(p_);
        if (exact_zero_) return *this;
        mpz_class num = q.get_num(), den = q.get_den();
        long w = detail::remove_p(num, p_) - detail::remove_p(den, p_);
        if (is_inexact_zero()) return o_term(p_, v_ + w);
        mpz_class mod = detail::pow_ui(p_, n_);
        mpz_class deninv;
        mpz_invert(deninv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t());
        PadicNumber r = *this;
        r.v_ += w;
        r.u_ = ((u_ * num % mod) * deninv) % mod;
        if (r.u_ < 0) r.u_ += mod;
        return r;
    }

    PadicNumber scale(long num, long den = 1) const { return scale(mpq_class(num, den)); }

    /// Add an exact rational (no precision attached to the scalar).
    PadicNumber add_exact(const mpq_class& q) const {
        if (q == 0) return *this;
        if (exact_zero_) {
            // The result inherits no precision limit; callers embedding exact
            // data into dead reckoning should pick a precision explicitly.
            throw std::domain_error("PadicNumber: add_exact to exact zero needs a precision; use from_rational");
        }
        long m = abs_precision();
        mpz_class num = q.get_num(), den = q.get_den();
        long w = detail::remove_p(num, p_) - detail::remove_p(den, p_);
        long base = std::min(is_inexact_zero() ? m : v_, w);
        if (m <= base) return o_term(p_, m);
        mpz_class mod = detail::pow_ui(p_, m - base);
        mpz_class deninv;
        mpz_invert(deninv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t());
        mpz_class s = (is_inexact_zero() ? mpz_class(0) : mpz_class(detail::pow_ui(p_, v_ - base) * u_));
        s += detail::pow_ui(p_, w - base) * num * deninv;
        return canonicalize(p_, base, s, m);
    }

    PadicNumber pow(long e) const {
        if (e == 0) {
            if (is_zero()) throw std::domain_error("PadicNumber: 0^0");
            return one(p_, n_ > 0 ? n_ : 1);
        }
        PadicNumber b = e < 0 ? inv() : *this;
        unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
        if (b.is_exact_zero()) return b;
        if (b.is_inexact_zero()) return o_term(p_, v_ * static_cast<long>(k));
        PadicNumber acc = one(p_, b.n_);
        while (k) {
            if (k & 1) acc = acc.mul(b);
            b = k > 1 ? b.mul(b) : b;
            k >>= 1;
        }
        return acc;
    }

    /// Forget digits beyond absolute precision m (used to model lost tails).
    PadicNumber cap_abs_precision(long m) const {
        if (exact_zero_) return o_term(p_, m);
        if (abs_precision() <= m) return *this;
        if (is_inexact_zero()) return o_term(p_, m);
        if (v_ >= m) return o_term(p_, m);
        PadicNumber r = *this;
        r.n_ = m - v_;
        r.u_ %= detail::pow_ui(p_, r.n_);
        // Capping can expose a shorter unit that is again divisible by p.
        return canonicalize(p_, r.v_, r.u_, m);
    }

    /// True when x and y agree at their shared precision.
    bool indistinguishable_from(const PadicNumber& o) const { return sub(o).is_zero(); }

    /// Structural equality of the stored representation.
    bool same_representation(const PadicNumber& o) const {
        return p_ == o.p_ && exact_zero_ == o.exact_zero_ && v_ == o.v_ && u_ == o.u_ && n_ == o.n_;
    }

    std::string to_string() const {
        if (exact_zero_) return "0";
        if (is_inexact_zero()) return "O(" + std::to_string(p_) + "^" + std::to_string(v_) + ")";
        std::string s = u_.get_str();
        return s + "*" + std::to_string(p_) + "^" + std::to_string(v_) + " + O(" +
               std::to_string(p_) + "^" + std::to_string(v_ + n_) + ")";
    }

private:
    static long check_prime(long p) {
        if (p < 2) throw std::domain_error("PadicNumber: p must be a prime >= 2");
        return p;
    }

    void require_same_prime(const PadicNumber& o) const {
        if (p_ != o.p_) throw std::domain_error("PadicNumber: mixed primes");
    }

    /// Normalize p^base * s known modulo p^m into one of the three states.
    static PadicNumber canonicalize(long p, long base, mpz_class s, long m) {
        if (m <= base) return o_term(p, m);
        mpz_class mod = detail::pow_ui(p, m - base);
        s %= mod;
        if (s < 0) s += mod;
        if (s == 0) return o_term(p, m);
        long w = detail::remove_p(s, p);
        long v = base + w;
        long n = m - v;
        if (n <= 0) return o_term(p, m);
        PadicNumber r;
        r.p_ = p;
        r.exact_zero_ = false;
        r.v_ = v;
        r.n_ = n;
        r.u_ = s % detail::pow_ui(p, n);
        return r;
    }

    long p_;
    long v_;
    mpz_class u_;
    long n_;
    bool exact_zero_;
};

/// Binomial coefficient C(a, k) for a p-adic a, via the falling-factorial
/// product.  Division by j <= k is exact, so the relative precision of the
/// result matches the input's; the valuation may drop by up to v_p(k!).
inline PadicNumber binom_zp(const PadicNumber& a, long k) {
    if (k < 0) throw std::domain_error("binom_zp: negative k");
    long digits = a.digits() > 0 ? a.digits() : 1;
    PadicNumber c = PadicNumber::one(a.prime(), digits);
    for (long j = 0; j < k; ++j) {
        c = c.mul(a.add_exact(mpq_class(-j)));
        c = c.scale(mpq_class(1, j + 1));
    }
    return c;
}

/// v_p(k!) by Legendre's formula.
inline long factorial_valuation(long p, long k) {
    long s = 0;
    for (long q = p; q <= k; q *= p) {
        s += k / q;
        if (q > k / p) break;
    }
    return s;
}

/// log(1+x) for v(x) >= 1 (p = 2: v(x) >= 2), where the series converges.
inline PadicNumber padic_log1p(const PadicNumber& x) {
    if (x.is_exact_zero()) return x;
    long p = x.prime();
    long v = x.valuation();
    if (x.is_inexact_zero() || v < (p == 2 ? 2 : 1))
        throw std::domain_error("padic_log1p: argument outside the domain of convergence");
    long target = v + x.digits() + 1;
    PadicNumber acc = x;
    PadicNumber power = x;
    for (long j = 2;; ++j) {
        long vp_j = 0;
        for (long q = j; q % p == 0; q /= p) ++vp_j;
        if (j * v - vp_j >= target) break;
        power = power.mul(x);
        acc = acc.add(power.scale(mpq_class(j % 2 ? 1 : -1, j)));
    }
    return acc;
}

}  // namespace pglab

#endif  // PGLAB_PADIC_HPP
