#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pglab/padic.hpp"

using pglab::PadicNumber;
using pglab::binom_zp;
using pglab::kInfValuation;

namespace {

constexpr int kIterations = 200;

mpz_class pow_ui(long p, long n) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, n);
    return r;
}

/// Independent extended-Euclid inverse, used as an oracle against inv().
mpz_class euclid_inverse(const mpz_class& a, const mpz_class& m) {
    mpz_class old_r = a % m, r = m, old_s = 1, s = 0;
    while (r != 0) {
        mpz_class q = old_r / r;
        mpz_class tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
    }
    if (old_r != 1 && old_r != -1) throw std::runtime_error("not invertible");
    if (old_r == -1) old_s = -old_s;
    old_s %= m;
    if (old_s < 0) old_s += m;
    return old_s;
}

struct Rng {
    std::mt19937 gen;
    explicit Rng(unsigned seed) : gen(seed) {}

    long uniform(long lo, long hi) {  // inclusive bounds
        return lo + static_cast<long>(gen() % static_cast<unsigned long>(hi - lo + 1));
    }

    mpz_class unit_mod(long p, long digits) {
        mpz_class u = 0;
        for (long i = 0; i < digits; ++i) u = u * p + uniform(0, p - 1);
        if (mpz_divisible_ui_p(u.get_mpz_t(), p)) u += 1 + uniform(0, p - 2);
        return u % pow_ui(p, digits);
    }

    PadicNumber regular(long p, long digits, long vlo = -3, long vhi = 3) {
        return PadicNumber::make(p, uniform(vlo, vhi), unit_mod(p, digits), digits);
    }
};

}  // namespace

TEST_CASE("sum with carry loses one digit of relative precision") {
    auto x = PadicNumber::from_integer(3, 2, 4);
    auto y = PadicNumber::from_integer(3, 1, 4);
    auto s = x.add(y);
    REQUIRE(s.valuation() == 1);
    REQUIRE(s.unit_part() == 1);
    REQUIRE(s.digits() == 3);
}

TEST_CASE("inverse of 2 in Q_3 at four digits") {
    auto x = PadicNumber::from_integer(3, 2, 4);
    auto inv = x.inv();
    REQUIRE(inv.valuation() == 0);
    REQUIRE(inv.digits() == 4);
    // Oracle: extended Euclid on the raw residues.
    REQUIRE(inv.unit_part() == euclid_inverse(2, pow_ui(3, 4)));
    REQUIRE(inv.unit_part() == 41);
    REQUIRE(x.mul(inv).sub(PadicNumber::one(3, 4)).is_zero());
}

TEST_CASE("exact zero and inexact zero are distinct states") {
    auto z = PadicNumber::zero(5);
    REQUIRE(z.is_exact_zero());
    REQUIRE(z.is_zero());
    REQUIRE(z.valuation() == kInfValuation);

    auto x = PadicNumber::from_integer(5, 7, 6);
    auto d = x.sub(x);
    REQUIRE(d.is_zero());
    REQUIRE_FALSE(d.is_exact_zero());
    REQUIRE(d.is_inexact_zero());
    REQUIRE(d.valuation() == 6);  // divisibility bound = shared absolute precision

    REQUIRE_THROWS_AS(d.inv(), pglab::precision_error);
    REQUIRE_THROWS_AS(z.inv(), std::domain_error);
}

TEST_CASE("binomial coefficient of a half") {
    for (long p : {3L, 5L}) {
        auto half = PadicNumber::from_rational(p, 1, 2, 24);
        auto c = binom_zp(half, 2);
        // Oracle: exact rational arithmetic, then embedding.
        mpq_class expect = mpq_class(1, 2) * (mpq_class(1, 2) - 1) / 2;
        REQUIRE(expect == mpq_class(-1, 8));
        REQUIRE(c.sub(PadicNumber::from_rational(p, expect, 24)).is_zero());
    }
}

TEST_CASE("binomial of a unit stays integral") {
    Rng rng(7701);
    for (int it = 0; it < kIterations; ++it) {
        long p = std::array<long, 3>{2, 3, 5}[it % 3];
        auto a = rng.regular(p, 24, 0, 0);
        long k = rng.uniform(0, 12);
        REQUIRE(binom_zp(a, k).valuation() >= 0);
    }
}

TEST_CASE("ring laws hold at the tracked precision") {
    Rng rng(40917);
    for (int it = 0; it < kIterations; ++it) {
        long p = std::array<long, 3>{2, 3, 5}[it % 3];
        auto x = rng.regular(p, 24);
        auto y = rng.regular(p, 20);
        auto z = rng.regular(p, 22);

        REQUIRE(x.add(y).sub(y.add(x)).is_zero());
        REQUIRE(x.mul(y).sub(y.mul(x)).is_zero());
        REQUIRE(x.mul(y.add(z)).sub(x.mul(y).add(x.mul(z))).is_zero());
        REQUIRE(x.mul(y).mul(z).sub(x.mul(y.mul(z))).is_zero());
    }
}

TEST_CASE("multiplication adds valuations and keeps the smaller precision") {
    Rng rng(50313);
    for (int it = 0; it < kIterations; ++it) {
        long p = std::array<long, 3>{2, 3, 5}[it % 3];
        auto x = rng.regular(p, rng.uniform(5, 24));
        auto y = rng.regular(p, rng.uniform(5, 24));
        auto m = x.mul(y);
        REQUIRE(m.valuation() == x.valuation() + y.valuation());
        REQUIRE(m.digits() == std::min(x.digits(), y.digits()));
    }
}

TEST_CASE("addition never invents digits") {
    Rng rng(61414);
    for (int it = 0; it < kIterations; ++it) {
        long p = std::array<long, 3>{2, 3, 5}[it % 3];
        auto x = rng.regular(p, rng.uniform(5, 24));
        auto y = rng.regular(p, rng.uniform(5, 24));
        auto s = x.add(y);
        REQUIRE(s.abs_precision() <= std::min(x.abs_precision(), y.abs_precision()));
        // The sum of representatives reduces to the stored digits.
        auto back = s.sub(x).sub(y);
        REQUIRE(back.is_zero());
    }
}

TEST_CASE("inversion round-trips at full precision") {
    Rng rng(72215);
    for (int it = 0; it < kIterations; ++it) {
        long p = std::array<long, 3>{2, 3, 5}[it % 3];
        auto x = rng.regular(p, 24);
        auto r = x.inv().inv();
        REQUIRE(r.sub(x).is_zero());
        REQUIRE(r.digits() == x.digits());
        REQUIRE(x.mul(x.inv()).sub(PadicNumber::one(p, 24)).is_zero());
    }
}

TEST_CASE("exact scalar operations preserve relative precision") {
    Rng rng(83116);
    for (int it = 0; it < kIterations; ++it) {
        long p = std::array<long, 3>{2, 3, 5}[it % 3];
        auto x = rng.regular(p, 24);
        long num = rng.uniform(1, 50);
        long den = rng.uniform(1, 50);
        auto y = x.scale(mpq_class(num, den));
        REQUIRE(y.digits() == x.digits());
        auto back = y.scale(mpq_class(den, num));
        REQUIRE(back.sub(x).is_zero());
    }
}

TEST_CASE("legendre formula for factorial valuations") {
    REQUIRE(pglab::factorial_valuation(3, 9) == 4);
    REQUIRE(pglab::factorial_valuation(2, 10) == 8);
    REQUIRE(pglab::factorial_valuation(5, 4) == 0);
    long acc = 0;
    for (long k = 1; k <= 30; ++k) {
        mpz_class kz(k);
        acc += pglab::detail::remove_p(kz, 3);
        REQUIRE(pglab::factorial_valuation(3, k) == acc);
    }
}
