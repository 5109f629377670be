#ifndef PGLAB_CYCLO_HPP
#define PGLAB_CYCLO_HPP

/// Arithmetic in the cyclotomic extensions K_n = Q_p(zeta) with zeta a
/// primitive p^n-th root of unity.
///
/// Elements are polynomials in zeta of degree < d = p^(n-1)(p-1), reduced
/// modulo the p^n-th cyclotomic polynomial Phi(T) = sum_{i<p} T^(i*p^(n-1)).
/// The extension is totally ramified of degree d, so valuations are rationals
/// with denominator dividing d; they are computed from the valuation of the
/// norm (the determinant of the multiplication matrix), never assumed.

#include <gmpxx.h>

#include <string>
#include <vector>

#include "pglab/linalg.hpp"
#include "pglab/padic.hpp"

namespace pglab {

class CycloElement {
public:
    CycloElement() : p_(3), n_(1), c_(2, PadicNumber::zero(3)) {}

    CycloElement(long p, long level)
        : p_(p), n_(check_level(level)), c_(degree_of(p, level), PadicNumber::zero(p)) {}

    static long degree_of(long p, long level) {
        long d = p - 1;
        for (long i = 1; i < level; ++i) d *= p;
        return d;
    }

    static CycloElement from_scalar(long p, long level, const PadicNumber& a) {
        CycloElement x(p, level);
        x.c_[0] = a;
        return x;
    }

    static CycloElement zero(long p, long level) { return CycloElement(p, level); }

    static CycloElement one(long p, long level, long digits) {
        return from_scalar(p, level, PadicNumber::one(p, digits));
    }

    /// zeta itself (for p = 2, level 1 the degree is 1 and zeta = -1).
    static CycloElement zeta(long p, long level, long digits) {
        CycloElement x(p, level);
        std::vector<PadicNumber> raw(degree_of(p, level) + 2, PadicNumber::zero(p));
        raw[1] = PadicNumber::one(p, digits);
        x.assign_reduced(std::move(raw));
        return x;
    }

    static CycloElement from_coeffs(long p, long level, std::vector<PadicNumber> coeffs) {
        CycloElement x(p, level);
        x.assign_reduced(std::move(coeffs));
        return x;
    }

    long prime() const { return p_; }
    long level() const { return n_; }
    long degree() const { return static_cast<long>(c_.size()); }
    const std::vector<PadicNumber>& coeffs() const { return c_; }
    const PadicNumber& coeff(long j) const { return c_.at(static_cast<std::size_t>(j)); }

    bool is_zero() const {
        for (const auto& a : c_)
            if (!a.is_zero()) return false;
        return true;
    }

    /// Smallest coefficient valuation: an integer lower bound for the true
    /// (rational) valuation, adequate for pivot choices and zero thresholds.
    long coeff_valuation_floor() const {
        long m = kInfValuation;
        for (const auto& a : c_) m = std::min(m, a.valuation());
        return m;
    }

    CycloElement neg() const {
        CycloElement r = *this;
        for (auto& a : r.c_) a = a.neg();
        return r;
    }

    CycloElement add(const CycloElement& o) const {
        require_compatible(o);
        CycloElement r = *this;
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = r.c_[i].add(o.c_[i]);
        return r;
    }

    CycloElement sub(const CycloElement& o) const { return add(o.neg()); }

    CycloElement scale(const PadicNumber& a) const {
        CycloElement r = *this;
        for (auto& x : r.c_) x = x.mul(a);
        return r;
    }

    CycloElement scale(const mpq_class& q) const {
        CycloElement r = *this;
        for (auto& x : r.c_) x = x.scale(q);
        return r;
    }

    CycloElement mul(const CycloElement& o) const {
        require_compatible(o);
        std::vector<PadicNumber> prod(2 * c_.size(), PadicNumber::zero(p_));
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].is_exact_zero()) continue;
            for (std::size_t j = 0; j < o.c_.size(); ++j) {
                if (o.c_[j].is_exact_zero()) continue;
                prod[i + j] = prod[i + j].add(c_[i].mul(o.c_[j]));
            }
        }
        CycloElement r(p_, n_);
        r.assign_reduced(std::move(prod));
        return r;
    }

    /// Inverse through the multiplication matrix; fails when the element is
    /// indistinguishable from a zero divisor at working precision.
    CycloElement inv() const {
        if (is_zero()) throw std::domain_error("CycloElement: inverse of zero at working precision");
        long d = degree();
        PadicMatrix m = multiplication_matrix();
        std::vector<PadicNumber> e0(d, PadicNumber::zero(p_));
        long digits = 1;
        for (const auto& a : c_) digits = std::max(digits, a.digits());
        e0[0] = PadicNumber::one(p_, digits);
        auto x = padic_solve(m, e0, p_);
        CycloElement r(p_, n_);
        r.c_ = std::move(x);
        return r;
    }

    /// Valuation as an exact rational with denominator dividing the degree,
    /// computed from the norm; nullopt when zero at working precision.
    std::optional<mpq_class> valuation() const {
        auto vdet = padic_det_valuation(multiplication_matrix());
        if (!vdet) return std::nullopt;
        mpq_class v(*vdet, degree());
        v.canonicalize();
        return v;
    }

    /// Galois action zeta -> zeta^a for an integer a prime to p.
    CycloElement galois(const mpz_class& a) const {
        mpz_class pn = detail::pow_ui(p_, n_);
        mpz_class am = a % pn;
        if (am < 0) am += pn;
        if (mpz_divisible_ui_p(am.get_mpz_t(), static_cast<unsigned long>(p_)))
            throw std::domain_error("CycloElement: galois exponent must be a unit");
        std::vector<PadicNumber> raw(static_cast<std::size_t>(mpz_get_ui(pn.get_mpz_t())),
                                     PadicNumber::zero(p_));
        for (std::size_t j = 0; j < c_.size(); ++j) {
            if (c_[j].is_exact_zero()) continue;
            mpz_class e = (am * static_cast<long>(j)) % pn;
            raw[mpz_get_ui(e.get_mpz_t())] = raw[mpz_get_ui(e.get_mpz_t())].add(c_[j]);
        }
        CycloElement r(p_, n_);
        r.assign_reduced(std::move(raw));
        return r;
    }

    /// Embed K_n into K_m (m >= n) via zeta_n = zeta_m^(p^(m-n)).
    CycloElement embed(long m) const {
        if (m < n_) throw std::domain_error("CycloElement: embedding must not lower the level");
        if (m == n_) return *this;
        long step = 1;
        for (long i = n_; i < m; ++i) step *= p_;
        mpz_class pm = detail::pow_ui(p_, m);
        std::vector<PadicNumber> raw(static_cast<std::size_t>(mpz_get_ui(pm.get_mpz_t())),
                                     PadicNumber::zero(p_));
        for (std::size_t j = 0; j < c_.size(); ++j) {
            if (c_[j].is_exact_zero()) continue;
            mpz_class e = (mpz_class(step) * static_cast<long>(j)) % pm;
            raw[mpz_get_ui(e.get_mpz_t())] = raw[mpz_get_ui(e.get_mpz_t())].add(c_[j]);
        }
        CycloElement r(p_, m);
        r.assign_reduced(std::move(raw));
        return r;
    }

    /// The scalar component, asserting all other coordinates vanish at
    /// working precision (used to descend K_n -> Q_p after symmetrization).
    PadicNumber scalar_part(bool* clean = nullptr) const {
        bool ok = true;
        for (std::size_t j = 1; j < c_.size(); ++j)
            if (!c_[j].is_zero()) ok = false;
        if (clean) *clean = ok;
        else if (!ok) throw std::domain_error("CycloElement: value is not rational at working precision");
        return c_[0];
    }

    bool indistinguishable_from(const CycloElement& o) const { return sub(o).is_zero(); }

    std::string to_string() const {
        std::string s;
        for (std::size_t j = 0; j < c_.size(); ++j) {
            if (c_[j].is_zero()) continue;
            if (!s.empty()) s += " + ";
            s += "(" + c_[j].to_string() + ")*z^" + std::to_string(j);
        }
        return s.empty() ? "0" : s;
    }

private:
    static long check_level(long level) {
        if (level < 1) throw std::domain_error("CycloElement: level must be >= 1");
        return level;
    }

    void require_compatible(const CycloElement& o) const {
        if (p_ != o.p_ || n_ != o.n_)
            throw std::domain_error("CycloElement: mixed primes or levels");
    }

    /// Reduce a raw coefficient vector (any length) modulo zeta^(p^n) = 1 and
    /// then modulo Phi, writing into c_.
    void assign_reduced(std::vector<PadicNumber> raw) {
        long d = degree_of(p_, n_);
        long pn = p_;
        for (long i = 1; i < n_; ++i) pn *= p_;
        std::vector<PadicNumber> folded(static_cast<std::size_t>(pn), PadicNumber::zero(p_));
        for (std::size_t e = 0; e < raw.size(); ++e) {
            if (raw[e].is_exact_zero()) continue;
            folded[e % static_cast<std::size_t>(pn)] =
                folded[e % static_cast<std::size_t>(pn)].add(raw[e]);
        }
        // zeta^d = -(1 + zeta^q + ... + zeta^((p-2)q)) with q = p^(n-1).
        long q = pn / p_;
        for (long e = pn - 1; e >= d; --e) {
            PadicNumber ce = folded[static_cast<std::size_t>(e)];
            if (ce.is_exact_zero()) continue;
            folded[static_cast<std::size_t>(e)] = PadicNumber::zero(p_);
            for (long i = 0; i <= p_ - 2; ++i) {
                long tgt = e - d + i * q;
                folded[static_cast<std::size_t>(tgt)] =
                    folded[static_cast<std::size_t>(tgt)].sub(ce);
            }
        }
        c_.assign(folded.begin(), folded.begin() + d);
    }

    PadicMatrix multiplication_matrix() const {
        long d = degree();
        PadicMatrix m(static_cast<std::size_t>(d),
                      std::vector<PadicNumber>(static_cast<std::size_t>(d), PadicNumber::zero(p_)));
        CycloElement col = *this;
        long digits = 1;
        for (const auto& a : c_) digits = std::max(digits, a.digits());
        CycloElement z = zeta(p_, n_, digits);
        for (long j = 0; j < d; ++j) {
            for (long i = 0; i < d; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = col.c_[static_cast<std::size_t>(i)];
            if (j + 1 < d) col = col.mul(z);
        }
        return m;
    }

    long p_;
    long n_;
    std::vector<PadicNumber> c_;
};

/// zeta - 1, the standard uniformizer-ish element of K_n.
inline CycloElement cyclo_epsilon_minus_one(long p, long level, long digits) {
    return CycloElement::zeta(p, level, digits)
        .sub(CycloElement::one(p, level, digits));
}

/// Coefficient-ring hooks used by the series template.
inline bool coeff_provably_zero(const CycloElement& a) {
    for (const auto& c : a.coeffs())
        if (!c.is_exact_zero()) return false;
    return true;
}
inline bool coeff_is_zero(const CycloElement& a) { return a.is_zero(); }
inline long coeff_valuation_floor(const CycloElement& a) { return a.coeff_valuation_floor(); }

}  // namespace pglab

#endif  // PGLAB_CYCLO_HPP
