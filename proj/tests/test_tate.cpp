#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pglab/tate.hpp"

using namespace pglab;

namespace {

struct Rng {
    std::mt19937 gen;
    explicit Rng(unsigned seed) : gen(seed) {}
    long uniform(long lo, long hi) {
        return lo + static_cast<long>(gen() % static_cast<unsigned long>(hi - lo + 1));
    }
    PadicNumber coefficient(long p, long digits) {
        long u = uniform(1, 60);
        while (u % p == 0) ++u;
        return PadicNumber::from_integer(p, u, digits);
    }
    ScalarSeries poly(long p, long lo, long hi, long digits) {
        ScalarSeries f = scalar_exact(p);
        for (long e = lo; e <= hi; ++e)
            if (uniform(0, 3) != 0) f.set_coeff(e, coefficient(p, digits));
        if (!f.first_meaningful_exponent()) f.set_coeff(hi, PadicNumber::one(p, digits));
        return f;
    }
};

long cyclo_residual_floor(const CycloElement& a, const CycloElement& b) {
    CycloElement d = a.sub(b);
    return d.is_zero() ? kInfValuation : d.coeff_valuation_floor();
}

}  // namespace

TEST_CASE("the level-1 point has the expected first two coefficients") {
    long p = 3;
    TateSeries pt = tate_point(p, 1, 4, 24);
    REQUIRE(cyclo_residual_floor(pt.coeff(0), cyclo_epsilon_minus_one(p, 1, 24)) == kInfValuation);
    CycloElement expected = CycloElement::zeta(p, 1, 24).scale(mpq_class(1, p));
    REQUIRE(cyclo_residual_floor(pt.coeff(1), expected) == kInfValuation);
    REQUIRE(cyclo_residual_floor(iota_n(series_x(p, 24), 1, 4).coeff(0),
                                 cyclo_epsilon_minus_one(p, 1, 24)) >= 20);
}

TEST_CASE("the logarithm maps to t over p^n") {
    long p = 3;
    // The level-n point's t^j coefficient sits at valuation -nj - v_p(j!), so
    // certifying 16 digits through t^7 at level 2 needs inputs carrying
    // 16 + 14 + 2 guard digits; the logarithm's coefficients are exact
    // rationals, so any budget is legitimate.
    struct Case {
        long level;
        long window;
    } cases[] = {{1, 80}, {2, 260}};
    for (const auto& c : cases) {
        ScalarSeries t = s_log_oneplus(p, c.window, 40);
        TateSeries img = iota_n(t, c.level, 8);
        mpz_class pn = 1;
        for (long i = 0; i < c.level; ++i) pn *= p;
        TateSeries expected(CycloElement::zero(p, c.level), 0, 8);
        expected.set_coeff(
            1, CycloElement::from_scalar(p, c.level,
                                         PadicNumber::from_rational(p, mpq_class(mpz_class(1), pn), 40)));
        REQUIRE(series_residual_floor(img, expected) >= 16);
    }
}

TEST_CASE("the constant term of the inverse point matches direct field inversion") {
    for (long p : {3L, 5L}) {
        ScalarSeries xinv = ScalarSeries::monomial(PadicNumber::zero(p), PadicNumber::one(p, 24), -1);
        CycloElement via_series = delta_coeff(iota_n(xinv, 1, 6), 0);
        CycloElement via_field = cyclo_epsilon_minus_one(p, 1, 24).inv();
        REQUIRE(cyclo_residual_floor(via_series, via_field) >= 18);
        auto v = via_series.valuation();
        REQUIRE(v.has_value());
        REQUIRE(*v == mpq_class(-1, p - 1));
    }
}

TEST_CASE("the p-power substitution descends one level with the same t") {
    long p = 3;
    // Level-2 comparisons through t^7 ride point coefficients at valuation
    // down to -2*7 - v_p(7!), so the integer inputs carry guard digits.
    ScalarSeries x = series_x(p, 40);
    TateSeries lhs = iota_n(op_phi(x), 2, 8);
    TateSeries rhs = tate_embed(iota_n(x, 1, 8), 2);
    REQUIRE(series_residual_floor(lhs, rhs) >= 18);
    // And for a less trivial input.
    Rng rng(3);
    ScalarSeries f = rng.poly(p, 0, 4, 40);
    REQUIRE(series_residual_floor(iota_n(op_phi(f), 2, 6), tate_embed(iota_n(f, 1, 6), 2)) >= 18);
}

TEST_CASE("evaluation is a ring homomorphism") {
    Rng rng(7);
    long p = 3;
    for (long level : {1L, 2L}) {
        for (int it = 0; it < 6; ++it) {
            ScalarSeries f = rng.poly(p, -1, 4, 32);
            ScalarSeries g = rng.poly(p, 0, 4, 32);
            TateSeries lhs = iota_n(f.mul(g), level, 6);
            TateSeries rhs = iota_n(f, level, 6).mul(iota_n(g, level, 6));
            REQUIRE(series_residual_floor(lhs, rhs) >= 14);
        }
    }
}

TEST_CASE("evaluation intertwines the unit action with the target action") {
    Rng rng(13);
    long p = 3;
    for (long level : {1L, 2L}) {
        for (int it = 0; it < 4; ++it) {
            long a = 2 + 3 * rng.uniform(0, 3);
            GammaElement g(p, mpz_class(a), 32);
            ScalarSeries f = rng.poly(p, 0, 4, 32);
            TateSeries lhs = iota_n(op_gamma(f, g), level, 6);
            TateSeries rhs = tate_gamma(iota_n(f, level, 6), mpz_class(a));
            REQUIRE(series_residual_floor(lhs, rhs) >= 16);
        }
    }
    // A pole case at level 1, with the substitution computed on a window wide
    // enough that the hidden tail sits below the threshold and guard digits
    // covering the image coefficients' mildly negative valuations.
    long a = 5;
    GammaElement g(p, mpz_class(a), 32);
    ScalarSeries f = ScalarSeries::monomial(PadicNumber::zero(p), PadicNumber::one(p, 32), -1);
    TateSeries lhs = iota_n(op_gamma(f, g, 60), 1, 5);
    TateSeries rhs = tate_gamma(iota_n(f, 1, 5), mpz_class(a));
    REQUIRE(series_residual_floor(lhs, rhs) >= 16);
}

TEST_CASE("derivation intertwining: both routes agree") {
    long p = 3;
    // On the logarithm both sides are 1 plus window noise; exact rational
    // coefficients take guard digits to certify 16 through t^6.
    ScalarSeries t = s_log_oneplus(p, 80, 32);
    IntertwineReport r1 = check_intertwine(t, 1, 6, 16);
    REQUIRE(r1.pass);
    // On X the agreement holds to the full guarded budget.
    IntertwineReport r2 = check_intertwine(series_x(p, 32), 1, 6, 20);
    REQUIRE(r2.pass);
    // Across a pole.
    ScalarSeries xinv = ScalarSeries::monomial(PadicNumber::zero(p), PadicNumber::one(p, 32), -1);
    IntertwineReport r3 = check_intertwine(xinv, 1, 6, 14);
    REQUIRE(r3.pass);
    // Random polynomials at both levels.
    Rng rng(19);
    for (long level : {1L, 2L}) {
        for (int it = 0; it < 5; ++it) {
            ScalarSeries f = rng.poly(p, -1, 4, 32);
            REQUIRE(check_intertwine(f, level, 6, 14).pass);
        }
    }
}

TEST_CASE("coefficient extraction agrees with the derivative route") {
    long p = 3;
    TateSeries F = iota_n(series_x(p, 24), 1, 8);
    for (long k : {0L, 1L, 2L, 3L}) {
        FactorialReport rep = factorial_identity_check(F, k);
        REQUIRE(rep.residual_floor >= 20);
    }
    ScalarSeries t = s_log_oneplus(p, 80, 24);
    FactorialReport rep = factorial_identity_check(iota_n(t, 1, 8), 1);
    REQUIRE(rep.residual_floor >= 16);
    REQUIRE(cyclo_residual_floor(
                rep.direct, CycloElement::from_scalar(p, 1, PadicNumber::from_rational(p, 1, p, 24))) >= 16);
}

TEST_CASE("divisibility by the logarithm transfers to vanishing constant terms") {
    long p = 3;
    Rng rng(29);
    long w1 = 80, w2 = 260;
    for (int it = 0; it < 3; ++it) {
        // A multiple of the logarithm: both verdicts positive.
        ScalarSeries g = rng.poly(p, 0, 3, 24);
        ScalarSeries mult = s_log_oneplus(p, w2, 24).mul(g);
        REQUIRE(s_tdivide(mult).ok);
        REQUIRE(delta_coeff(iota_n(mult.truncate(w1), 1, 4), 0).coeff_valuation_floor() >= 16);
        REQUIRE(delta_coeff(iota_n(mult, 2, 4), 0).coeff_valuation_floor() >= 16);
        // Knock it off the divisible locus: both verdicts negative.
        ScalarSeries off = mult.add(series_const(p, rng.coefficient(p, 24)));
        TDivision td = s_tdivide(off);
        REQUIRE_FALSE(td.ok);
        REQUIRE(td.obstruction == 0);
        CycloElement d1 = delta_coeff(iota_n(off.truncate(w1), 1, 4), 0);
        REQUIRE(!d1.is_zero());
        REQUIRE(d1.coeff_valuation_floor() < 16);
    }
}
