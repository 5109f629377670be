#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pglab/pgmod.hpp"

using namespace pglab;

namespace {

struct Rng {
    std::mt19937 gen;
    explicit Rng(unsigned seed) : gen(seed) {}
    long uniform(long lo, long hi) {
        return lo + static_cast<long>(gen() % static_cast<unsigned long>(hi - lo + 1));
    }
    PadicNumber coefficient(long p, long digits) {
        long v = uniform(0, 2);
        long u = uniform(1, 60);
        while (u % p == 0) ++u;
        mpz_class pv = 1;
        for (long i = 0; i < v; ++i) pv *= p;
        return PadicNumber::from_integer(p, u * pv, digits);
    }
    ScalarSeries poly(long p, long lo, long hi, long digits) {
        ScalarSeries f = scalar_exact(p);
        for (long e = lo; e <= hi; ++e)
            if (uniform(0, 3) != 0) f.set_coeff(e, coefficient(p, digits));
        if (!f.first_meaningful_exponent()) f.set_coeff(hi, PadicNumber::one(p, digits));
        return f;
    }
    long unit(long p, long lo, long hi) {
        long a = uniform(lo, hi);
        while (a % p == 0) ++a;
        if (p == 2) a = 1 + 4 * uniform(1, (hi - 1) / 4);
        return a;
    }
    std::vector<long> weights(long d, long lo, long hi) {
        std::vector<long> w;
        for (long i = 0; i < d; ++i) w.push_back(uniform(lo, hi));
        return w;
    }
};

bool agrees_exactly(const ScalarSeries& f, const ScalarSeries& g) { return f.sub(g).is_zero(); }

ModuleElement module_truncate(const ModuleElement& y, long ord) {
    ModuleElement r;
    for (const auto& f : y) r.push_back(f.truncate(ord));
    return r;
}

/// t^(-k) on a window wide enough for the products in these tests.
ScalarSeries t_power(long p, long k, long window, long digits) {
    ScalarSeries t = s_log_oneplus(p, window + std::max(-k, 1L) + 1, digits);
    if (k == 0) return series_const(p, PadicNumber::one(p, digits));
    ScalarSeries b = k > 0 ? t.invert(window) : t;
    ScalarSeries r = b;
    for (long i = 1; i < std::abs(k); ++i) r = r.mul(b, window);
    return r;
}

}  // namespace

TEST_CASE("module operators act coordinatewise with the weight twist") {
    long p = 5;
    TwistModule both = make_twist_module(p, {0, 1});
    ScalarSeries x = series_x(p, 24);
    ModuleElement phi_img = mod_phi(both, {x, x});
    REQUIRE(agrees_exactly(phi_img[0], op_phi(x)));
    REQUIRE(agrees_exactly(phi_img[1], op_phi(x)));

    TwistModule w1 = make_twist_module(p, {1});
    GammaElement g(p, mpz_class(7), 24);
    ScalarSeries c = series_const(p, PadicNumber::from_integer(p, 3, 24));
    ModuleElement tw = mod_gamma(w1, {c}, g);
    REQUIRE(agrees_exactly(tw[0], series_const(p, PadicNumber::from_integer(p, 21, 24))));

    TwistModule w0 = make_twist_module(p, {0});
    ScalarSeries xinv = ScalarSeries::monomial(PadicNumber::zero(p), PadicNumber::one(p, 24), -1);
    REQUIRE(agrees_exactly(mod_psi(w0, {xinv})[0], xinv));

    REQUIRE_THROWS_AS(mod_phi(both, {x}), std::domain_error);
    REQUIRE(make_twist_module(p, {2, 0}).labels == std::vector<std::string>{"e1", "e2"});
}

TEST_CASE("the canonical basis vector is fixed by the twisted action") {
    long p = 3;
    Rng rng(11);
    for (long k : {-2L, -1L, 1L, 2L}) {
        TwistModule M = make_twist_module(p, {k});
        ScalarSeries tk = t_power(p, k, 24, 32);
        GammaElement g(p, mpz_class(rng.unit(p, 2, 40)), 32);
        // gamma_a multiplies t^(-k) by a^(-k) and the twist puts a^(k) back.
        REQUIRE(series_residual_floor(mod_gamma(M, {tk}, g)[0], tk) >= 20);
        // nabla t^(-k) = -k t^(-k) cancels against the twist: the t-divided
        // action kills the basis vector.
        ModulePartial d = mod_partial(M, {tk});
        REQUIRE(d.value[0].is_zero());
    }
}

TEST_CASE("module identities hold on random elements") {
    Rng rng(23);
    for (long p : {2L, 3L, 5L}) {
        for (int it = 0; it < 4; ++it) {
            long d = rng.uniform(1, 3);
            TwistModule M = make_twist_module(p, rng.weights(d, -2, 2));
            ModuleElement y;
            for (long i = 0; i < d; ++i) y.push_back(rng.poly(p, 0, 6, 32));
            GammaElement g(p, mpz_class(rng.unit(p, 2, 50)), 32);

            // Exact polynomial inputs would blow up in degree under phi and
            // gamma, so every step runs on an explicit truncation window.
            // The left inverse of phi caps coefficient j of its output at
            // (w - p j)/(p - 1) - 1 against the unseen tail, so the checked
            // window stays well below w/p.
            long w = 120, cmp = 6;
            REQUIRE(module_residual_floor(module_truncate(mod_psi(M, mod_phi(M, y, w)), cmp),
                                          module_truncate(y, cmp)) >= 20);

            ScalarSeries x = rng.poly(p, 0, 4, 32);
            ModuleElement phix_y, x_psiy;
            for (long i = 0; i < d; ++i) phix_y.push_back(op_phi(x, w).mul(y[i], w));
            ModuleElement psi_y = mod_psi(M, y);
            for (long i = 0; i < d; ++i) x_psiy.push_back(x.mul(psi_y[i]));
            REQUIRE(module_residual_floor(module_truncate(mod_psi(M, phix_y), cmp),
                                          module_truncate(x_psiy, cmp)) >= 18);

            REQUIRE(module_residual_floor(
                        module_truncate(mod_psi(M, mod_gamma(M, y, g, w)), cmp),
                        module_truncate(mod_gamma(M, mod_psi(M, y), g, w), cmp)) >= 18);
            REQUIRE(module_residual_floor(mod_phi(M, mod_gamma(M, y, g, w), w),
                                          mod_gamma(M, mod_phi(M, y, w), g, w)) >= 18);
        }
    }
}

TEST_CASE("the infinitesimal action and its t-divided form") {
    long p = 3;

    // Weight 1 sends the constant section to t^(-1) times itself.
    TwistModule w1 = make_twist_module(p, {1});
    ScalarSeries one = series_const(p, PadicNumber::one(p, 40));
    REQUIRE(agrees_exactly(mod_nabla(w1, {one})[0], one));
    ModulePartial d1 = mod_partial(w1, {one});
    REQUIRE(d1.pole_order == std::vector<long>{1});
    ScalarSeries t = s_log_oneplus(p, 30, 40);
    REQUIRE(series_residual_floor(d1.value[0].mul(t), one) >= 20);

    // Weight 0 reduces to the scalar t-divided derivation.
    TwistModule w0 = make_twist_module(p, {0});
    Rng rng(31);
    for (int it = 0; it < 5; ++it) {
        ScalarSeries f = rng.poly(p, 0, 6, 40);
        ModulePartial d0 = mod_partial(w0, {f});
        REQUIRE(d0.pole_order == std::vector<long>{0});
        REQUIRE(series_residual_floor(d0.value[0], s_partial(f)) >= 20);
    }

    // Conjugating by t^(-k) turns the twisted action into the plain one.
    ScalarSeries tinv = t_power(p, 1, 12, 32);
    ModulePartial dk = mod_partial(w1, {tinv.mul(series_x(p, 40), 12)});
    ScalarSeries expected = tinv.mul(s_partial(series_x(p, 40)), 8);
    REQUIRE(series_residual_floor(dk.value[0].truncate(8), expected) >= 18);
}

TEST_CASE("the t-divided action preserves the lattice") {
    long p = 3;
    Rng rng(41);
    for (long k = -2; k <= 2; ++k) {
        TwistModule M = make_twist_module(p, {k});
        for (int it = 0; it < 4; ++it) {
            ScalarSeries f = rng.poly(p, 0, 5, 32);
            ScalarSeries tk = t_power(p, k, 16, 32);
            ModulePartial d = mod_partial(M, {tk.mul(f, 16)});
            ScalarSeries expected = tk.mul(s_partial(f), 12);
            REQUIRE(series_residual_floor(d.value[0].truncate(12), expected) >= 14);
            auto verdict = ndr_membership(M, d.value, NdrMode::kInN);
            REQUIRE(verdict[0].member);
        }
    }
}

TEST_CASE("the unit action intertwines the t-divided derivation with one twist") {
    long p = 5;
    Rng rng(53);
    TwistModule M = make_twist_module(p, {1, -1});
    for (int it = 0; it < 3; ++it) {
        ModuleElement y{rng.poly(p, 0, 5, 32), rng.poly(p, 0, 5, 32)};
        long a = rng.unit(p, 2, 30);
        GammaElement g(p, mpz_class(a), 32);
        for (long k = 1; k <= 2; ++k) {
            for (long w = 1; w <= 2; ++w) {
                ModuleElement lhs = y, rhs = y;
                for (long i = 0; i < w; ++i) lhs = mod_gamma(M, lhs, g, 40);
                for (long i = 0; i < k; ++i) lhs = mod_partial(M, lhs).value;
                for (long i = 0; i < k; ++i) rhs = mod_partial(M, rhs).value;
                for (long i = 0; i < w; ++i) rhs = mod_gamma(M, rhs, g, 40);
                PadicNumber scale = g.value().pow(k * w);
                for (auto& h : rhs) h = h.scale_coeff(scale);
                REQUIRE(module_residual_floor(lhs, rhs) >= 14);
            }
        }
    }
}

TEST_CASE("lattice membership reduces to t-divisibility with the weight offset") {
    long p = 3;
    ScalarSeries one = series_const(p, PadicNumber::one(p, 24));

    TwistModule w0 = make_twist_module(p, {0});
    auto v = ndr_membership(w0, {one}, NdrMode::kInTN);
    REQUIRE_FALSE(v[0].member);
    REQUIRE(v[0].obstruction == 0);

    TwistModule w1 = make_twist_module(p, {1});
    REQUIRE(ndr_membership(w1, {one}, NdrMode::kInN)[0].member);
    REQUIRE(ndr_membership(w1, {one}, NdrMode::kInTN)[0].member);

    ScalarSeries t = s_log_oneplus(p, 24, 24);
    REQUIRE(ndr_membership(w0, {t.mul(series_x(p, 24))}, NdrMode::kInTN)[0].member);

    // A pole obstructs weight-0 membership but weight 1 absorbs one t.
    ScalarSeries xinv = ScalarSeries::monomial(PadicNumber::zero(p), PadicNumber::one(p, 24), -1);
    auto pole = ndr_membership(w0, {xinv}, NdrMode::kInN);
    REQUIRE_FALSE(pole[0].member);
    REQUIRE(pole[0].obstruction == -1);
    REQUIRE(ndr_membership(w1, {xinv}, NdrMode::kInN)[0].member);

    Rng rng(61);
    for (int it = 0; it < 20; ++it) {
        long k = rng.uniform(-2, 2);
        TwistModule M = make_twist_module(p, {k});
        ScalarSeries f = rng.poly(p, 0, 5, 24);
        if (rng.uniform(0, 1) == 1) f = f.mul(t, 20);
        auto in_t = ndr_membership(M, {f}, NdrMode::kInTN);
        auto in_n = ndr_membership(M, {f}, NdrMode::kInN);
        if (in_t[0].member) REQUIRE(in_n[0].member);  // t N sits inside N
        if (k >= 0) REQUIRE(in_n[0].member);          // nonnegative weights absorb series
        if (k == 0) REQUIRE(in_t[0].member == s_tdivide(f).ok);
    }
}

TEST_CASE("the weight filtration keeps exactly the summands at or above the cut") {
    TwistModule M = make_twist_module(3, {2, 0, -1});
    REQUIRE(fil_j(M, 1).weights == std::vector<long>{2});
    REQUIRE(fil_j(M, -1).weights == M.weights);
    REQUIRE(fil_j(M, 3).weights.empty());
    REQUIRE(fil_quotient(M, 1).weights == std::vector<long>{0, -1});
    REQUIRE(fil_j(M, 1).labels == std::vector<std::string>{"e1"});

    // The quotient by the filtration step carries nothing at or above the cut.
    Rng rng(71);
    for (int it = 0; it < 20; ++it) {
        TwistModule R = make_twist_module(3, rng.weights(rng.uniform(1, 5), -3, 3));
        long j = rng.uniform(-3, 4);
        REQUIRE(fil_j(fil_quotient(R, j), j).weights.empty());
        REQUIRE(fil_j(R, j).weights.size() + fil_quotient(R, j).weights.size() ==
                R.weights.size());
    }
}

TEST_CASE("the vanishing criterion flags the unbounded pole and passes t-multiples") {
    long p = 3;
    TwistModule w0 = make_twist_module(p, {0});
    ScalarSeries xinv = ScalarSeries::monomial(PadicNumber::zero(p), PadicNumber::one(p, 32), -1);

    GCriterionReport r = g_criterion(w0, {xinv}, 0, {1}, 6);
    REQUIRE_FALSE(r.pass);
    const GCriterionCell& cell = r.cells[0][0];
    REQUIRE_FALSE(cell.zero);
    // The value is the inverse of eps - 1, of valuation -1/(p-1).
    CycloElement oracle = cyclo_epsilon_minus_one(p, 1, 32).inv();
    REQUIRE(cell.via_substitution.sub(oracle).coeff_valuation_floor() >= 18);
    REQUIRE(cell.via_substitution.valuation() == mpq_class(-1, p - 1));
    REQUIRE(cell.agreement_floor >= 18);

    // A t-multiple known mod X^W evaluates at level n to a genuine tail of
    // valuation about W/(p^(n-1)(p-1)); the window must push it above tau.
    Rng rng(83);
    ScalarSeries t = s_log_oneplus(p, 90, 40);
    for (int it = 0; it < 3; ++it) {
        ScalarSeries f = rng.poly(p, 0, 4, 40);
        GCriterionReport tm = g_criterion(w0, {t.mul(f, 86)}, 0, {1, 2}, 4, 12);
        REQUIRE(tm.pass);
    }

    // One t-divided application, cross-validated between the two routes.
    GCriterionReport r1 = g_criterion(w0, {xinv}, 1, {1}, 6);
    REQUIRE(r1.cells[0][0].agreement_floor >= 12);

    // Weight 1: the constant line is t^(-1) e, so the extracted coefficient
    // is the t^(-1) term of the evaluation.  Every series coordinate lies in
    // t N = B e there, and indeed evaluates with no pole.
    TwistModule w1 = make_twist_module(p, {1});
    ScalarSeries one = series_const(p, PadicNumber::one(p, 32));
    REQUIRE(g_criterion(w1, {one}, 0, {1, 2}, 4).pass);
    REQUIRE(g_criterion(w1, {series_x(p, 32)}, 0, {1, 2}, 4).pass);

    // Nonzero weight exercises the twisted transport on the target side.
    GCriterionReport rw = g_criterion(w1, {series_x(p, 32)}, 1, {1}, 5);
    REQUIRE(rw.cells[0][0].agreement_floor >= 10);
}

TEST_CASE("the relation finder certifies planted invariants") {
    long p = 3;
    GammaElement g(p, mpz_class(2), 32);
    GammaRelationBounds bounds;

    TwistModule w0 = make_twist_module(p, {0});
    ScalarSeries five = series_const(p, PadicNumber::from_integer(p, 5, 32));
    GammaRelationResult r = find_gamma_relation(w0, {five}, g, bounds, 18, 24);
    REQUIRE(r.status == Verdict::kTrue);
    REQUIRE(r.v == 1);
    REQUIRE(r.lambda.size() == 2);
    REQUIRE(r.lambda[1].sub(PadicNumber::one(p, 24)).is_zero());
    REQUIRE(r.lambda[0].add(PadicNumber::one(p, 24)).valuation() >= 18);
    REQUIRE(r.residual_floor >= 18);

    TwistModule wm1 = make_twist_module(p, {-1});
    ScalarSeries t = s_log_oneplus(p, 28, 32);
    GammaRelationResult rt = find_gamma_relation(wm1, {t}, g, bounds, 18, 24);
    REQUIRE(rt.status == Verdict::kTrue);
    REQUIRE(rt.v == 1);
    REQUIRE(rt.lambda[0].add(PadicNumber::one(p, 24)).valuation() >= 18);
    REQUIRE(rt.residual_floor >= 18);
}

TEST_CASE("the relation finder reports no relation for a generic element") {
    long p = 3;
    GammaElement g(p, mpz_class(2), 32);
    GammaRelationBounds bounds{3, 4};

    TwistModule w0 = make_twist_module(p, {0});
    GammaRelationResult r = find_gamma_relation(w0, {series_x(p, 32)}, g, bounds, 18, 24);
    REQUIRE(r.status == Verdict::kFalse);
    REQUIRE(r.lambda.empty());

    // Two independent coordinates force a two-step orbit span first.
    TwistModule w00 = make_twist_module(p, {0, 0});
    ScalarSeries onepx = series_x(p, 32).add(series_const(p, PadicNumber::one(p, 32)));
    GammaRelationResult r2 = find_gamma_relation(w00, {series_x(p, 32), onepx}, g,
                                                 GammaRelationBounds{2, 2}, 18, 24);
    REQUIRE(r2.status == Verdict::kFalse);
    REQUIRE(r2.v == 2);  // the orbit span is found; no constant relation follows

    REQUIRE_THROWS_AS(find_gamma_relation(w0, {scalar_exact(p)}, g, bounds), std::domain_error);
}
