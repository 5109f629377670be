#ifndef PGLAB_IO_HPP
#define PGLAB_IO_HPP

/// Boundary formats: JSON round-trips for numbers, series, run
/// configuration, module descriptors and solver systems, plus a small
/// expression grammar for entering series and rational functions as text.
/// Nothing here participates in the arithmetic; every function either
/// serializes a value faithfully or refuses the input with an exception the
/// command layer maps to a usage error.

#include <cctype>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pglab/pgmod.hpp"
#include "pglab/wronskian.hpp"

namespace pglab {

using Json = nlohmann::ordered_json;

namespace detail {

/// The arithmetic layers only range-check the prime; user-supplied input is
/// validated for real here, by trial division (desk-scale primes only).
inline bool is_prime_long(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// p-adic numbers: {"p": 3, "v": 0, "u": "<decimal unit>", "N": 24}.  The
// exact zero carries v = "inf"; an O(p^m) term has u = "0" and v = m.

inline Json padic_to_json(const PadicNumber& a) {
    Json j;
    j["p"] = a.prime();
    if (a.is_exact_zero()) {
        j["v"] = "inf";
        j["u"] = "0";
        j["N"] = 0;
        return j;
    }
    j["v"] = a.valuation();
    j["u"] = a.unit_part().get_str();
    j["N"] = a.digits();
    return j;
}

inline PadicNumber padic_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("p") || !j.contains("v") || !j.contains("u") ||
        !j.contains("N"))
        throw std::invalid_argument("p-adic value needs fields p, v, u, N");
    long p = j.at("p").get<long>();
    if (j.at("v").is_string()) {
        if (j.at("v").get<std::string>() != "inf")
            throw std::invalid_argument("p-adic valuation must be a number or \"inf\"");
        return PadicNumber::zero(p);
    }
    long v = j.at("v").get<long>();
    mpz_class u;
    if (u.set_str(j.at("u").get<std::string>(), 10) != 0)
        throw std::invalid_argument("p-adic unit must be a decimal string");
    if (u == 0) return PadicNumber::o_term(p, v);
    long n = j.at("N").get<long>();
    if (n < 1) throw std::invalid_argument("p-adic precision must be positive");
    while (mpz_divisible_ui_p(u.get_mpz_t(), static_cast<unsigned long>(p))) {
        u /= p;
        ++v;
    }
    return PadicNumber::make(p, v, u, n);
}

// ---------------------------------------------------------------------------
// Series: {"p": 3, "n_min": -1, "order": 12 | "exact", "terms": [{"e": 0,
// "c": {...}}, ...]} with term coefficients in the number format above.

inline Json series_to_json(const ScalarSeries& f) {
    Json j;
    j["p"] = f.zero_prototype().prime();
    j["n_min"] = f.n_min();
    if (f.is_exact())
        j["order"] = "exact";
    else
        j["order"] = f.order();
    Json terms = Json::array();
    long hi = f.is_exact() ? f.support_end() : f.order();
    for (long e = f.n_min(); e < hi; ++e) {
        const PadicNumber& c = f.coeff(e);
        if (c.is_exact_zero()) continue;
        Json term;
        term["e"] = e;
        term["c"] = padic_to_json(c);
        terms.push_back(std::move(term));
    }
    j["terms"] = std::move(terms);
    return j;
}

inline ScalarSeries series_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("p") || !j.contains("terms"))
        throw std::invalid_argument("series needs fields p and terms");
    long p = j.at("p").get<long>();
    PadicNumber proto = PadicNumber::zero(p);
    long n_min = j.contains("n_min") ? j.at("n_min").get<long>() : 0;
    ScalarSeries f = [&] {
        if (!j.contains("order") || (j.at("order").is_string() &&
                                     j.at("order").get<std::string>() == "exact"))
            return ScalarSeries(proto);
        return ScalarSeries(proto, n_min, j.at("order").get<long>());
    }();
    for (const Json& term : j.at("terms")) {
        if (!term.contains("e") || !term.contains("c"))
            throw std::invalid_argument("series term needs fields e and c");
        PadicNumber c = padic_from_json(term.at("c"));
        if (c.prime() != p) throw std::invalid_argument("series coefficient at the wrong prime");
        f.set_coeff(term.at("e").get<long>(), c);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Display form, compact and sign-aware: "1+X", "1-3*X^2", "X^-1".  Large or
// low-precision coefficients fall back to the positional digit form; the
// display is for reports, the JSON form above is the round-trip format.

inline std::string format_padic(const PadicNumber& a) { return a.to_string(); }

namespace detail {

/// A small balanced representative of a regular value, when one exists.
inline std::optional<mpz_class> balanced_value(const PadicNumber& a) {
    if (a.is_zero() || a.valuation() < 0) return std::nullopt;
    mpz_class mod = pow_ui(a.prime(), a.digits());
    mpz_class u = a.unit_part();
    if (2 * u > mod) u -= mod;
    mpz_class value = u * pow_ui(a.prime(), a.valuation());
    if (mpz_sizeinbase(value.get_mpz_t(), 10) > 12) return std::nullopt;
    return value;
}

}  // namespace detail

inline std::string format_series(const ScalarSeries& f) {
    std::string s;
    long hi = f.is_exact() ? f.support_end() : f.order();
    for (long e = f.n_min(); e < hi; ++e) {
        const PadicNumber& c = f.coeff(e);
        if (c.is_zero()) continue;
        std::string cs;
        bool neg = false;
        if (auto bal = detail::balanced_value(c)) {
            neg = *bal < 0;
            mpz_class abs = neg ? mpz_class(-*bal) : *bal;
            if (abs == 1 && e != 0)
                cs = "";
            else
                cs = abs.get_str();
        } else {
            cs = "(" + c.to_string() + ")";
        }
        std::string term = cs;
        if (e != 0) {
            if (!cs.empty()) term += "*";
            term += "X";
            if (e != 1) term += "^" + std::to_string(e);
        }
        if (s.empty())
            s += neg ? "-" + term : term;
        else
            s += (neg ? "-" : "+") + term;
    }
    if (s.empty()) return "0";
    if (!f.is_exact()) s += "+O(X^" + std::to_string(f.order()) + ")";
    return s;
}

// ---------------------------------------------------------------------------
// Expression grammar shared by the series and rational-function readers:
//
//   expr   := ['-'] term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := base ['^' ['-'] integer]
//   base   := integer | 'X' | 't' | '(' expr ')'
//
// 't' denotes the logarithm series and is only available for series values;
// '/' and negative powers invert on the reader's working window.

namespace detail {

template <class V, class Ops>
class ExprReader {
public:
    ExprReader(const std::string& text, const Ops& ops) : text_(text), ops_(ops) {}

    V read() {
        V v = expr();
        skip();
        if (pos_ != text_.size())
            throw std::invalid_argument("unexpected character '" +
                                        std::string(1, text_[pos_]) + "' in expression");
        return v;
    }

private:
    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    V expr() {
        bool neg = eat('-');
        V v = term();
        if (neg) v = ops_.neg(v);
        for (;;) {
            if (eat('+'))
                v = ops_.add(v, term());
            else if (eat('-'))
                v = ops_.sub(v, term());
            else
                return v;
        }
    }

    V term() {
        V v = factor();
        for (;;) {
            if (eat('*'))
                v = ops_.mul(v, factor());
            else if (eat('/'))
                v = ops_.div(v, factor());
            else
                return v;
        }
    }

    V factor() {
        V v = base();
        if (eat('^')) {
            bool neg = eat('-');
            long e = integer();
            if (neg) return ops_.pow(v, -e);
            return ops_.pow(v, e);
        }
        return v;
    }

    V base() {
        skip();
        if (pos_ >= text_.size()) throw std::invalid_argument("expression ends unexpectedly");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            V v = expr();
            if (!eat(')')) throw std::invalid_argument("expression has an unmatched '('");
            return v;
        }
        if (c == 'X') {
            ++pos_;
            return ops_.variable();
        }
        if (c == 't') {
            ++pos_;
            return ops_.log_series();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return ops_.constant(integer_mpz());
        throw std::invalid_argument("expression has an unexpected character '" +
                                    std::string(1, c) + "'");
    }

    long integer() {
        mpz_class z = integer_mpz();
        if (!z.fits_slong_p()) throw std::invalid_argument("exponent out of range");
        return z.get_si();
    }

    mpz_class integer_mpz() {
        skip();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) throw std::invalid_argument("expression expects a number");
        return mpz_class(text_.substr(start, pos_ - start));
    }

    const std::string& text_;
    const Ops& ops_;
    std::size_t pos_ = 0;
};

struct SeriesOps {
    long p;
    long digits;
    long window;

    ScalarSeries neg(const ScalarSeries& a) const { return a.neg(); }
    ScalarSeries add(const ScalarSeries& a, const ScalarSeries& b) const { return a.add(b); }
    ScalarSeries sub(const ScalarSeries& a, const ScalarSeries& b) const { return a.sub(b); }
    ScalarSeries mul(const ScalarSeries& a, const ScalarSeries& b) const { return a.mul(b); }
    ScalarSeries div(const ScalarSeries& a, const ScalarSeries& b) const {
        return a.mul(invert_on_window(b));
    }
    ScalarSeries pow(const ScalarSeries& a, long e) const {
        if (e < 0) return pow(invert_on_window(a), -e);
        ScalarSeries r = series_const(p, PadicNumber::one(p, digits));
        ScalarSeries base = a;
        for (long i = 0; i < e; ++i) r = r.mul(base);
        return r;
    }
    ScalarSeries variable() const { return series_x(p, digits); }
    ScalarSeries log_series() const { return s_log_oneplus(p, window, digits); }
    ScalarSeries constant(const mpz_class& z) const {
        return series_const(p, PadicNumber::from_integer(p, z, digits));
    }

    ScalarSeries invert_on_window(const ScalarSeries& b) const {
        // A monomial inverts exactly; anything else only on the window.
        if (b.is_exact()) {
            std::optional<long> lead = b.first_meaningful_exponent();
            if (lead && b.support_end() == *lead + 1) return b.invert(kExactOrder);
        }
        return b.invert(window);
    }
};

struct RatfuncOps {
    RationalFunction neg(const RationalFunction& a) const { return a.neg(); }
    RationalFunction add(const RationalFunction& a, const RationalFunction& b) const {
        return a.add(b);
    }
    RationalFunction sub(const RationalFunction& a, const RationalFunction& b) const {
        return a.sub(b);
    }
    RationalFunction mul(const RationalFunction& a, const RationalFunction& b) const {
        return a.mul(b);
    }
    RationalFunction div(const RationalFunction& a, const RationalFunction& b) const {
        return a.div(b);
    }
    RationalFunction pow(const RationalFunction& a, long e) const {
        if (e < 0) return pow(a.inv(), -e);
        RationalFunction r = RationalFunction::from_constant(mpq_class(1));
        for (long i = 0; i < e; ++i) r = r.mul(a);
        return r;
    }
    RationalFunction variable() const { return RationalFunction::variable(); }
    RationalFunction log_series() const {
        throw std::invalid_argument("'t' is only available in series expressions");
    }
    RationalFunction constant(const mpz_class& z) const {
        return RationalFunction::from_constant(mpq_class(z));
    }
};

}  // namespace detail

/// Read a series expression such as "(1+X)^3", "1/X" or "t*X".  Division and
/// negative powers of non-monomials truncate to the given window.
inline ScalarSeries parse_series(const std::string& text, long p, long digits, long window) {
    detail::SeriesOps ops{p, digits, window};
    return detail::ExprReader<ScalarSeries, detail::SeriesOps>(text, ops).read();
}

/// Read a rational-function expression such as "3+5*X" or "1/(X+1)".
inline RationalFunction parse_ratfunc(const std::string& text) {
    detail::RatfuncOps ops;
    return detail::ExprReader<RationalFunction, detail::RatfuncOps>(text, ops).read();
}

inline std::string format_ratfunc(const RationalFunction& f) { return f.to_string(); }

// ---------------------------------------------------------------------------
// Run configuration: {"p": 3, "M": 32, "N": 24, "M_t": 8, "depth": 2,
// "tau": 20, "seed": 1}.  Every field is positive; the seed fixes all
// randomness so equal configurations give byte-identical reports.

struct RunConfig {
    long p = 3;
    long M = 32;
    long N = 24;
    long M_t = 8;
    long depth = 2;
    long tau = 20;
    unsigned long seed = 1;
};

inline Json runconfig_to_json(const RunConfig& c) {
    Json j;
    j["p"] = c.p;
    j["M"] = c.M;
    j["N"] = c.N;
    j["M_t"] = c.M_t;
    j["depth"] = c.depth;
    j["tau"] = c.tau;
    j["seed"] = c.seed;
    return j;
}

inline RunConfig runconfig_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("configuration must be a JSON object");
    RunConfig c;
    auto get = [&](const char* name, long& out) {
        if (!j.contains(name)) return;
        if (!j.at(name).is_number_integer())
            throw std::invalid_argument(std::string("configuration field ") + name +
                                        " must be an integer");
        out = j.at(name).get<long>();
    };
    get("p", c.p);
    get("M", c.M);
    get("N", c.N);
    get("M_t", c.M_t);
    get("depth", c.depth);
    get("tau", c.tau);
    if (j.contains("seed")) c.seed = j.at("seed").get<unsigned long>();
    for (const auto& item : j.items())
        if (item.key() != "p" && item.key() != "M" && item.key() != "N" && item.key() != "M_t" &&
            item.key() != "depth" && item.key() != "tau" && item.key() != "seed")
            throw std::invalid_argument("configuration has an unknown field '" + item.key() + "'");
    if (!detail::is_prime_long(c.p)) throw std::invalid_argument("configuration needs a prime p");
    if (c.M < 1 || c.N < 1 || c.M_t < 1 || c.depth < 1 || c.tau < 1)
        throw std::invalid_argument("configuration fields must be positive");
    return c;
}

// ---------------------------------------------------------------------------
// Module descriptor: {"p": 3, "weights": [0, 1], "truncation": 8,
// "precision": 24} with optional "labels".

struct ModuleDescriptor {
    TwistModule module;
    long truncation = 8;
    long precision = 24;
};

inline Json module_to_json(const ModuleDescriptor& d) {
    Json j;
    j["p"] = d.module.p;
    j["weights"] = d.module.weights;
    j["truncation"] = d.truncation;
    j["precision"] = d.precision;
    j["labels"] = d.module.labels;
    return j;
}

inline ModuleDescriptor module_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("p") || !j.contains("weights"))
        throw std::invalid_argument("module descriptor needs fields p and weights");
    ModuleDescriptor d;
    long p = j.at("p").get<long>();
    if (!detail::is_prime_long(p)) throw std::invalid_argument("module descriptor needs a prime p");
    std::vector<long> weights = j.at("weights").get<std::vector<long>>();
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    d.module = make_twist_module(p, weights, labels);
    if (j.contains("truncation")) d.truncation = j.at("truncation").get<long>();
    if (j.contains("precision")) d.precision = j.at("precision").get<long>();
    if (d.truncation < 1 || d.precision < 1)
        throw std::invalid_argument("module truncation and precision must be positive");
    return d;
}

// ---------------------------------------------------------------------------
// Constant-relation systems: {"H": "rational" | "series", "v": 1, "k": 2,
// "vectors": [["1"], ["X"], ["3+5*X"]]} with entries in the expression
// grammar.  Series systems additionally read the prime and windows from the
// run configuration.

inline bool wronskian_input_is_rational(const Json& j) {
    if (!j.is_object() || !j.contains("H"))
        throw std::invalid_argument("system needs a backend field H");
    std::string h = j.at("H").get<std::string>();
    if (h == "rational" || h == "Q(X)") return true;
    if (h == "series") return false;
    throw std::invalid_argument("system backend H must be \"rational\" or \"series\"");
}

namespace detail {

inline std::vector<std::vector<std::string>> system_entries(const Json& j, long& v, long& k) {
    if (!j.contains("v") || !j.contains("k") || !j.contains("vectors"))
        throw std::invalid_argument("system needs fields v, k and vectors");
    v = j.at("v").get<long>();
    k = j.at("k").get<long>();
    std::vector<std::vector<std::string>> rows;
    for (const Json& vec : j.at("vectors")) rows.push_back(vec.get<std::vector<std::string>>());
    return rows;
}

}  // namespace detail

inline RationalSystem rational_system_from_json(const Json& j) {
    long v = 0, k = 0;
    auto rows = detail::system_entries(j, v, k);
    std::vector<std::vector<RationalFunction>> vectors;
    for (const auto& row : rows) {
        std::vector<RationalFunction> x;
        for (const auto& entry : row) x.push_back(parse_ratfunc(entry));
        vectors.push_back(std::move(x));
    }
    return make_rational_system(v, k, std::move(vectors));
}

inline SeriesSystem series_system_from_json(const Json& j, long p, long digits, long window,
                                            long tau) {
    long v = 0, k = 0;
    auto rows = detail::system_entries(j, v, k);
    std::vector<std::vector<ScalarSeries>> vectors;
    for (const auto& row : rows) {
        std::vector<ScalarSeries> x;
        for (const auto& entry : row) x.push_back(parse_series(entry, p, digits, window));
        vectors.push_back(std::move(x));
    }
    return make_series_system(v, k, std::move(vectors), tau, window);
}

}  // namespace pglab

#endif  // PGLAB_IO_HPP
