#ifndef PGLAB_RATFUNC_HPP
#define PGLAB_RATFUNC_HPP

/// Exact rational functions in one variable over Q, the computable
/// differential field used as the reference backend of the constant-relation
/// solver.  Elements are kept reduced with a monic denominator, so equality
/// is representational and the derivation d/dX is exact.

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pglab {

/// Dense polynomial over Q: coefficients from degree 0 upward, no trailing
/// zeros, the empty vector being the zero polynomial.
using QPoly = std::vector<mpq_class>;

namespace detail {

inline void poly_trim(QPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline long poly_degree(const QPoly& a) { return static_cast<long>(a.size()) - 1; }

inline QPoly poly_add(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), mpq_class(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    poly_trim(r);
    return r;
}

inline QPoly poly_neg(const QPoly& a) {
    QPoly r = a;
    for (auto& c : r) c = -c;
    return r;
}

inline QPoly poly_sub(const QPoly& a, const QPoly& b) { return poly_add(a, poly_neg(b)); }

inline QPoly poly_mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, mpq_class(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    poly_trim(r);
    return r;
}

inline std::pair<QPoly, QPoly> poly_divmod(const QPoly& a, const QPoly& b) {
    if (b.empty()) throw std::domain_error("polynomial division by zero");
    QPoly q, r = a;
    if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, mpq_class(0));
    while (r.size() >= b.size()) {
        mpq_class c = r.back() / b.back();
        std::size_t e = r.size() - b.size();
        q[e] = c;
        for (std::size_t i = 0; i < b.size(); ++i) r[e + i] -= c * b[i];
        poly_trim(r);
    }
    poly_trim(q);
    return {q, r};
}

inline QPoly poly_divexact(const QPoly& a, const QPoly& b) {
    auto [q, r] = poly_divmod(a, b);
    if (!r.empty()) throw std::logic_error("polynomial division expected to be exact");
    return q;
}

inline QPoly poly_monic(QPoly a) {
    poly_trim(a);
    if (a.empty()) return a;
    mpq_class lead = a.back();
    for (auto& c : a) c /= lead;
    return a;
}

inline QPoly poly_gcd(QPoly a, QPoly b) {
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
        QPoly r = poly_divmod(a, b).second;
        a = std::move(b);
        b = poly_monic(std::move(r));
    }
    return poly_monic(std::move(a));
}

inline QPoly poly_derivative(const QPoly& a) {
    if (a.size() <= 1) return {};
    QPoly r(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = mpq_class(static_cast<long>(i)) * a[i];
    poly_trim(r);
    return r;
}

inline std::string poly_to_string(const QPoly& a, const std::string& var = "X") {
    if (a.empty()) return "0";
    std::string s;
    for (long e = poly_degree(a); e >= 0; --e) {
        const mpq_class& c = a[static_cast<std::size_t>(e)];
        if (c == 0) continue;
        if (!s.empty()) s += " + ";
        if (e == 0 || c != 1) s += c.get_str();
        if (e > 0) {
            if (c != 1) s += "*";
            s += var;
            if (e > 1) s += "^" + std::to_string(e);
        }
    }
    return s;
}

}  // namespace detail

/// A reduced fraction of polynomials over Q with monic denominator.  The
/// zero element has an empty numerator and denominator 1, so is_zero and
/// equality need no normalization step.
class RationalFunction {
public:
    RationalFunction() : den_{mpq_class(1)} {}

    static RationalFunction from_constant(const mpq_class& c) {
        RationalFunction r;
        if (c != 0) r.num_ = {c};
        return r;
    }

    static RationalFunction variable() {
        RationalFunction r;
        r.num_ = {mpq_class(0), mpq_class(1)};
        return r;
    }

    static RationalFunction from_poly(QPoly n) {
        RationalFunction r;
        detail::poly_trim(n);
        r.num_ = std::move(n);
        return r;
    }

    static RationalFunction from_fraction(QPoly n, QPoly d) {
        RationalFunction r;
        r.num_ = std::move(n);
        r.den_ = std::move(d);
        r.reduce();
        return r;
    }

    const QPoly& num() const { return num_; }
    const QPoly& den() const { return den_; }

    bool is_zero() const { return num_.empty(); }

    bool is_constant() const { return num_.size() <= 1 && den_.size() == 1; }

    /// The value of a constant element; rejects anything of positive degree.
    mpq_class constant_value() const {
        if (!is_constant()) throw std::domain_error("rational function is not constant");
        return num_.empty() ? mpq_class(0) : num_[0];
    }

    RationalFunction neg() const {
        RationalFunction r;
        r.num_ = detail::poly_neg(num_);
        r.den_ = den_;
        return r;
    }

    RationalFunction add(const RationalFunction& o) const {
        return from_fraction(
            detail::poly_add(detail::poly_mul(num_, o.den_), detail::poly_mul(o.num_, den_)),
            detail::poly_mul(den_, o.den_));
    }

    RationalFunction sub(const RationalFunction& o) const { return add(o.neg()); }

    RationalFunction mul(const RationalFunction& o) const {
        return from_fraction(detail::poly_mul(num_, o.num_), detail::poly_mul(den_, o.den_));
    }

    RationalFunction inv() const {
        if (is_zero()) throw std::domain_error("inverse of the zero rational function");
        return from_fraction(den_, num_);
    }

    RationalFunction div(const RationalFunction& o) const { return mul(o.inv()); }

    RationalFunction scale(const mpq_class& c) const { return mul(from_constant(c)); }

    /// d/dX via the quotient rule; exact, with the result reduced.
    RationalFunction derivative() const {
        QPoly n = detail::poly_sub(detail::poly_mul(detail::poly_derivative(num_), den_),
                                   detail::poly_mul(num_, detail::poly_derivative(den_)));
        return from_fraction(std::move(n), detail::poly_mul(den_, den_));
    }

    bool equals(const RationalFunction& o) const { return sub(o).is_zero(); }

    std::string to_string(const std::string& var = "X") const {
        if (den_.size() == 1) return detail::poly_to_string(num_, var);
        return "(" + detail::poly_to_string(num_, var) + ")/(" + detail::poly_to_string(den_, var) + ")";
    }

private:
    void reduce() {
        detail::poly_trim(num_);
        detail::poly_trim(den_);
        if (den_.empty()) throw std::domain_error("rational function with zero denominator");
        if (num_.empty()) {
            den_ = {mpq_class(1)};
            return;
        }
        QPoly g = detail::poly_gcd(num_, den_);
        if (detail::poly_degree(g) > 0) {
            num_ = detail::poly_divexact(num_, g);
            den_ = detail::poly_divexact(den_, g);
        }
        mpq_class lead = den_.back();
        if (lead != 1) {
            for (auto& c : num_) c /= lead;
            for (auto& c : den_) c /= lead;
        }
    }

    QPoly num_;
    QPoly den_;  // monic, never zero
};

}  // namespace pglab

#endif  // PGLAB_RATFUNC_HPP
