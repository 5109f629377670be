#ifndef PGLAB_SUITES_HPP
#define PGLAB_SUITES_HPP

/// Randomized instance generators shared by the unit tests, the acceptance
/// battery, and the CLI.  All draws go through a caller-owned mt19937 via
/// modular reduction, so a fixed seed reproduces the same instances
/// everywhere.

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "pglab/wronskian.hpp"

namespace pglab::suites {

inline long draw(std::mt19937& g, long lo, long hi) {
    return lo + static_cast<long>(g() % static_cast<unsigned long>(hi - lo + 1));
}

inline mpq_class draw_rational(std::mt19937& g, long num_range = 6, long den_max = 3) {
    long num = draw(g, -num_range, num_range);
    long den = draw(g, 1, den_max);
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

inline mpq_class draw_nonzero_rational(std::mt19937& g, long num_range = 6, long den_max = 3) {
    for (;;) {
        mpq_class q = draw_rational(g, num_range, den_max);
        if (q != 0) return q;
    }
}

inline QPoly draw_poly(std::mt19937& g, long max_deg, long range = 4) {
    QPoly a(static_cast<std::size_t>(draw(g, 0, max_deg)) + 1);
    for (auto& c : a) c = mpq_class(draw(g, -range, range));
    detail::poly_trim(a);
    return a;
}

/// A polynomial of exactly the requested degree (nonzero leading term).
inline QPoly draw_poly_exact_degree(std::mt19937& g, long deg, long range = 4) {
    QPoly a(static_cast<std::size_t>(deg) + 1);
    for (auto& c : a) c = mpq_class(draw(g, -range, range));
    a.back() = mpq_class(draw(g, 1, range));
    if (draw(g, 0, 1)) a.back() = -a.back();
    return a;
}

/// A random field element: usually a small polynomial, sometimes divided by
/// X + a to exercise the reduction and clearing paths.
inline RationalFunction draw_rf(std::mt19937& g, long max_deg = 2) {
    RationalFunction f = RationalFunction::from_poly(draw_poly(g, max_deg));
    if (draw(g, 0, 3) == 0)
        f = f.div(RationalFunction::from_poly({mpq_class(draw(g, 1, 3)), mpq_class(1)}));
    return f;
}

/// A planted constant relation over Q(X): the last vector is a random
/// constant combination of the first s, which are redrawn until their
/// order-(k-1) prolongations are independent.  The planted constants are
/// the recovery oracle.
struct PlantedRational {
    RationalSystem system;
    std::vector<mpq_class> constants;
};

inline PlantedRational plant_rational(std::mt19937& g, long v_max = 4, long k_max = 3,
                                      long s_max = 3) {
    long v = draw(g, 1, v_max);
    long k = draw(g, 1, k_max);
    long s = draw(g, 1, std::min(s_max, k * v));  // independence needs room: s <= dim H^{k v}
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<std::vector<RationalFunction>> xs(static_cast<std::size_t>(s) + 1);
        for (long w = 0; w < s; ++w) {
            xs[static_cast<std::size_t>(w)].reserve(static_cast<std::size_t>(v));
            for (long j = 0; j < v; ++j) xs[static_cast<std::size_t>(w)].push_back(draw_rf(g));
        }
        std::vector<mpq_class> c(static_cast<std::size_t>(s));
        for (auto& q : c) q = draw_nonzero_rational(g);
        std::vector<RationalFunction>& last = xs.back();
        last.assign(static_cast<std::size_t>(v), RationalFunction());
        for (long w = 0; w < s; ++w)
            for (long j = 0; j < v; ++j)
                last[static_cast<std::size_t>(j)] = last[static_cast<std::size_t>(j)].add(
                    xs[static_cast<std::size_t>(w)][static_cast<std::size_t>(j)].scale(
                        c[static_cast<std::size_t>(w)]));
        RationalSystem sys = make_rational_system(v, k, std::move(xs));
        if (check_hypotheses(sys).h1 == Verdict::kTrue) return {std::move(sys), std::move(c)};
    }
    throw std::runtime_error("could not draw an independent planted system");
}

/// An instance whose only dependences have non-constant coefficients: every
/// vector is a non-constant multiple of one fixed vector, with multiplier
/// degrees pairwise distinct so no constant combination of the multipliers
/// vanishes.  With s = k+1 the order-k prolongations are forced into a span
/// of dimension k+1 < s+1, while the order-(k-1) prolongations of the first
/// s vectors are already dependent, so the independence hypothesis fails.
inline RationalSystem plant_adversarial(std::mt19937& g, long v_max = 4, long k_max = 2) {
    long k = draw(g, 1, k_max);
    long s = k + 1;
    long v = draw(g, 1, v_max);
    std::vector<RationalFunction> y;
    y.reserve(static_cast<std::size_t>(v));
    bool nonzero = false;
    for (long j = 0; j < v; ++j) {
        QPoly a = draw_poly(g, 2);
        nonzero = nonzero || !a.empty();
        y.push_back(RationalFunction::from_poly(std::move(a)));
    }
    if (!nonzero) y[0] = RationalFunction::from_constant(mpq_class(1));
    std::vector<std::vector<RationalFunction>> xs(static_cast<std::size_t>(s) + 1);
    for (long w = 0; w <= s; ++w) {
        RationalFunction mu = RationalFunction::from_poly(draw_poly_exact_degree(g, w + 1));
        xs[static_cast<std::size_t>(w)].reserve(static_cast<std::size_t>(v));
        for (long j = 0; j < v; ++j)
            xs[static_cast<std::size_t>(w)].push_back(mu.mul(y[static_cast<std::size_t>(j)]));
    }
    return make_rational_system(v, k, std::move(xs));
}

}  // namespace pglab::suites

#endif  // PGLAB_SUITES_HPP
