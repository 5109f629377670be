#ifndef PGLAB_PGMOD_HPP
#define PGLAB_PGMOD_HPP

/// Direct sums of rank-1 cyclotomic twists with the induced operator
/// calculus: coordinatewise p-power substitution and its left inverse, the
/// weight-twisted unit action and its infinitesimal form, membership tests
/// for the canonical t-power lattice, the weight filtration, the
/// vanishing-coefficient criterion evaluated along cyclotomic levels by two
/// independent routes, and a finder for constant-coefficient polynomial
/// relations in a fixed unit-action element.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "pglab/operators.hpp"
#include "pglab/series.hpp"
#include "pglab/tate.hpp"
#include "pglab/wronskian.hpp"

namespace pglab {

/// Direct sum of rank-1 twists over a fixed prime.  Summand i scales by
/// a^(k_i) under the unit action with exponent a and is fixed coordinatewise
/// by the p-power substitution, so the module is etale with identity matrix.
/// The canonical lattice of summand i is t^(-k_i) times the series ring, and
/// t^(-k_i) e_i is invariant under the combined action.
struct TwistModule {
    long p = 3;
    std::vector<long> weights;
    std::vector<std::string> labels;
};

inline TwistModule make_twist_module(long p, std::vector<long> weights,
                                     std::vector<std::string> labels = {}) {
    if (p < 2) throw std::domain_error("twist module needs a prime");
    if (labels.empty())
        for (std::size_t i = 0; i < weights.size(); ++i)
            labels.push_back("e" + std::to_string(i + 1));
    if (labels.size() != weights.size())
        throw std::domain_error("twist module labels must match the weights");
    TwistModule m;
    m.p = p;
    m.weights = std::move(weights);
    m.labels = std::move(labels);
    return m;
}

/// One coordinate per summand, shared prime.
using ModuleElement = std::vector<ScalarSeries>;

namespace detail {

inline void check_element(const TwistModule& M, const ModuleElement& y) {
    if (y.size() != M.weights.size())
        throw std::domain_error("module element has the wrong number of coordinates");
    for (const auto& f : y)
        if (f.zero_prototype().prime() != M.p)
            throw std::domain_error("module element coordinate has the wrong prime");
}

/// t^(-1) as a Laurent series on a window wide enough for products with f.
inline ScalarSeries t_inverse_for(const ScalarSeries& f) {
    long p = f.zero_prototype().prime();
    long digits = working_digits(f);
    long top = f.is_exact() ? f.support_end() + 8 : f.order();
    long w = top - std::min(f.n_min(), 0L) + 1;
    return s_log_oneplus(p, w + 1, digits).invert(w);
}

/// A coordinate in reduced form t^(-pole) num.  The X-expansion of 1/t
/// diverges at every cyclotomic evaluation point, so anything headed for
/// iota_n must keep its t-poles symbolic instead of multiplied in.
struct ReducedCoord {
    ScalarSeries num;
    long pole = 0;
};

/// One t-divided application on a weight-w summand in reduced form: the
/// twist contributes w and each symbolic pole contributes -1.  The pole is
/// never divided out even when the numerator admits it: quotients by t have
/// X-expansions whose coefficient valuations dive at the convergence radius,
/// so a cleared pole would poison every later evaluation.
inline ReducedCoord partial_reduced(const ReducedCoord& c, long weight) {
    ScalarSeries g = s_nabla(c.num).add(c.num.scale(mpq_class(weight - c.pole)));
    return {g, c.pole + 1};
}

}  // namespace detail

inline ModuleElement mod_phi(const TwistModule& M, const ModuleElement& y, long out_order = -1) {
    detail::check_element(M, y);
    ModuleElement r;
    r.reserve(y.size());
    for (const auto& f : y) r.push_back(op_phi(f, out_order));
    return r;
}

inline ModuleElement mod_psi(const TwistModule& M, const ModuleElement& y) {
    detail::check_element(M, y);
    ModuleElement r;
    r.reserve(y.size());
    for (const auto& f : y) r.push_back(op_psi(f));
    return r;
}

inline ModuleElement mod_gamma(const TwistModule& M, const ModuleElement& y,
                               const GammaElement& g, long out_order = -1) {
    detail::check_element(M, y);
    ModuleElement r;
    r.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        r.push_back(op_gamma(y[i], g, out_order).scale_coeff(g.value().pow(M.weights[i])));
    return r;
}

/// Infinitesimal unit action.  On a weight-k summand the twist contributes k
/// times the identity: nabla_D(f e) = (nabla f + k f) e.
inline ModuleElement mod_nabla(const TwistModule& M, const ModuleElement& y, long t_order = -1) {
    detail::check_element(M, y);
    ModuleElement r;
    r.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        r.push_back(s_nabla(y[i], t_order).add(y[i].scale(mpq_class(M.weights[i]))));
    return r;
}

/// t-divided infinitesimal action.  Coordinates whose numerator is not
/// t-divisible land in t^(-1) times the lattice; the pole is a reported
/// value, not an error.
struct ModulePartial {
    ModuleElement value;
    std::vector<long> pole_order;  // 0 when the coordinate stays integral, else 1
};

inline ModulePartial mod_partial(const TwistModule& M, const ModuleElement& y, long t_order = -1) {
    detail::check_element(M, y);
    ModulePartial out;
    out.value.reserve(y.size());
    out.pole_order.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        ScalarSeries num = s_nabla(y[i], t_order).add(y[i].scale(mpq_class(M.weights[i])));
        TDivision td = s_tdivide(num);
        if (td.ok) {
            out.value.push_back(td.quotient);
            out.pole_order.push_back(0);
        } else {
            out.value.push_back(num.mul(detail::t_inverse_for(num)));
            out.pole_order.push_back(1);
        }
    }
    return out;
}

/// Membership in the canonical lattice N = directsum t^(-k_i) B e_i, or in
/// t N.  For the weight-k summand, f e in t^j N means t^(j-k) divides f, so
/// nonpositive powers are automatic and positive powers reduce to repeated
/// t-division.
enum class NdrMode { kInN, kInTN };

struct NdrVerdict {
    bool member = true;
    std::optional<long> obstruction;  // exponent of the first obstructing coefficient
};

inline std::vector<NdrVerdict> ndr_membership(const TwistModule& M, const ModuleElement& y,
                                              NdrMode mode) {
    detail::check_element(M, y);
    long j = mode == NdrMode::kInTN ? 1 : 0;
    std::vector<NdrVerdict> out;
    out.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        long r = j - M.weights[i];
        NdrVerdict v;
        if (r <= 0) {
            // f must lie in t^r B with r <= 0: t^(-r) f must be a series.
            ScalarSeries g = y[i];
            for (long m = 0; m < -r; ++m) {
                long p = M.p;
                long w = g.is_exact() ? g.support_end() + 4 : g.order();
                g = g.mul(s_log_oneplus(p, std::max(w - std::min(g.n_min(), 0L), 2L),
                                        detail::working_digits(g)));
            }
            if (auto lo = g.first_confident_exponent(); lo && *lo < 0) {
                v.member = false;
                v.obstruction = *lo;
            }
        } else {
            ScalarSeries g = y[i];
            for (long m = 0; m < r && v.member; ++m) {
                TDivision td = s_tdivide(g);
                if (!td.ok) {
                    v.member = false;
                    v.obstruction = td.obstruction;
                } else {
                    g = td.quotient;
                }
            }
        }
        out.push_back(v);
    }
    return out;
}

/// Largest sub-sum all of whose weights are >= j.
inline TwistModule fil_j(const TwistModule& M, long j) {
    TwistModule r;
    r.p = M.p;
    for (std::size_t i = 0; i < M.weights.size(); ++i)
        if (M.weights[i] >= j) {
            r.weights.push_back(M.weights[i]);
            r.labels.push_back(M.labels[i]);
        }
    return r;
}

/// Complementary quotient: the summands of weight < j.
inline TwistModule fil_quotient(const TwistModule& M, long j) {
    TwistModule r;
    r.p = M.p;
    for (std::size_t i = 0; i < M.weights.size(); ++i)
        if (M.weights[i] < j) {
            r.weights.push_back(M.weights[i]);
            r.labels.push_back(M.labels[i]);
        }
    return r;
}

/// One criterion evaluation: the coefficient extracted after k applications
/// of the t-divided action, computed by differentiating before evaluation
/// (substitution route) and after evaluation (derivative route).
struct GCriterionCell {
    CycloElement via_substitution;
    CycloElement via_derivative;
    long agreement_floor = 0;
    bool zero = false;  // both routes vanish at the threshold
};

struct GCriterionReport {
    long k = 0;
    std::vector<long> levels;
    std::vector<std::vector<GCriterionCell>> cells;  // [level index][summand]
    bool pass = false;                               // every cell zero
    long tau = 0;
};

/// Evaluates the vanishing criterion for each summand at each level.  The
/// weight-k_i summand's constant line is spanned by t^(-k_i) e_i, so the
/// coordinate of the evaluated element along it is t^(k_i) times the series,
/// and the extracted value is the t^(-k_i) coefficient of the level-n
/// evaluation of the k-th t-divided iterate of y.  The derivative route
/// transports the action to the target: on the weight-k_i coordinate it is
/// h -> p^n (h' + k_i t^(-1) h).
///
/// Zero verdicts are threshold claims.  A truncated series that is a
/// t-multiple only up to its window evaluates to a tail of valuation about
/// window / (p^(n-1)(p-1)) at level n, never to a provable zero, so the
/// caller's truncation must push genuine tails above tau.
inline GCriterionReport g_criterion(const TwistModule& M, const ModuleElement& y, long k,
                                    const std::vector<long>& levels, long t_order,
                                    long tau = 20) {
    detail::check_element(M, y);
    if (k < 0) throw std::domain_error("criterion order must be nonnegative");
    if (levels.empty()) throw std::domain_error("criterion needs at least one level");
    for (long n : levels)
        if (n < 1) throw std::domain_error("criterion levels start at 1");
    long kmax = 0;
    for (long w : M.weights) kmax = std::max(kmax, w);
    long wt = t_order + kmax + 1;

    // Substitution route: differentiate on the source side in reduced form,
    // then evaluate.  iota_n sends t^(-m) h to p^(nm) t^(-m) iota_n(h), so the
    // poles are applied exactly on the target side instead of through the
    // divergent X-expansion of 1/t.
    std::vector<detail::ReducedCoord> z;
    z.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        z.push_back({y[i], 0});
        for (long m = 0; m < k; ++m)
            z.back() = detail::partial_reduced(z.back(), M.weights[i]);
    }

    GCriterionReport rep;
    rep.k = k;
    rep.levels = levels;
    rep.pass = true;
    rep.tau = tau;
    for (long n : levels) {
        mpz_class pn = 1;
        for (long m = 0; m < n; ++m) pn *= M.p;
        std::vector<GCriterionCell> row;
        row.reserve(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            long ki = M.weights[i];
            mpz_class pnm = 1;
            for (long m = 0; m < z[i].pole; ++m) pnm *= pn;
            GCriterionCell cell{
                delta_coeff(iota_n(z[i].num, n, wt + k), z[i].pole - ki)
                    .scale(mpq_class(pnm)),
                CycloElement::zero(M.p, n), 0, false};
            TateSeries F = iota_n(y[i], n, wt + k);
            for (long m = 0; m < k; ++m) {
                TateSeries d = F.derivative();
                if (ki != 0) d = d.add(F.shift(-1).scale(mpq_class(ki)));
                F = d.scale(mpq_class(pn));
            }
            cell.via_derivative = delta_coeff(F, -ki);
            CycloElement diff = cell.via_substitution.sub(cell.via_derivative);
            cell.agreement_floor = diff.is_zero() ? kInfValuation : diff.coeff_valuation_floor();
            auto small = [tau](const CycloElement& c) {
                return c.is_zero() || c.coeff_valuation_floor() >= tau;
            };
            cell.zero = small(cell.via_substitution) && small(cell.via_derivative);
            rep.pass = rep.pass && cell.zero;
            row.push_back(std::move(cell));
        }
        rep.cells.push_back(std::move(row));
    }
    return rep;
}

/// Search bounds for the relation finder: the span depth tried for the orbit
/// and the maximal relation length minus one.
struct GammaRelationBounds {
    long v_max = 3;
    long s_max = 4;
};

/// Either a constant-coefficient polynomial P(g) = sum_w lambda[w] g^w with
/// lambda.back() = 1 annihilating y up to the reported residual, or a
/// bounded no-relation verdict (kFalse), or indeterminate when precision
/// cannot decide a rank along the way.  Every verdict carries the threshold
/// and window it was decided at.
struct GammaRelationResult {
    Verdict status = Verdict::kIndeterminate;
    long v = 0;
    std::vector<PadicNumber> lambda;
    long residual_floor = 0;
    long tau = 0;
    long work_order = 0;
};

/// Replays the torsion-detection pipeline: find the minimal v with g^v(y) in
/// the span of the lower orbit over the series field, push the span
/// coefficients up the orbit by the semilinear recurrence, and ask the
/// prolongation solver for a constant relation among the coefficient
/// vectors.  A constant relation there annihilates y by construction; the
/// reported residual floor re-verifies it on the orbit itself.
inline GammaRelationResult find_gamma_relation(const TwistModule& M, const ModuleElement& y,
                                               const GammaElement& g,
                                               const GammaRelationBounds& bounds, long tau = 20,
                                               long work_order = -1) {
    detail::check_element(M, y);
    if (bounds.v_max < 1 || bounds.s_max < 1)
        throw std::domain_error("relation bounds must be positive");
    bool nonzero = false;
    for (const auto& f : y) nonzero = nonzero || !f.is_zero();
    if (!nonzero) throw std::domain_error("relation finder needs a nonzero element");
    if (work_order < 0) {
        long w = kInfValuation;
        long span = 1;
        for (const auto& f : y) {
            if (!f.is_exact()) w = std::min(w, f.order());
            span = std::max(span, f.support_end());
        }
        work_order = w == kInfValuation ? span + 16 : w;
    }

    GammaRelationResult res;
    res.tau = tau;
    res.work_order = work_order;
    std::size_t d = y.size();
    ScalarSeries zero(y[0].zero_prototype(), 0, 0);

    long orbit_len = std::max(bounds.v_max, bounds.s_max) + 1;
    std::vector<ModuleElement> orbit{y};
    for (long w = 1; w <= orbit_len; ++w)
        orbit.push_back(mod_gamma(M, orbit.back(), g, work_order));

    auto stacked = [&](long w) {
        std::vector<ScalarSeries> col;
        col.reserve(d);
        for (std::size_t i = 0; i < d; ++i) col.push_back(orbit[w][i].truncate(work_order));
        return col;
    };

    bool fuzzy = false;
    long v = 0;
    std::vector<ScalarSeries> span_coeffs;
    for (long vc = 1; vc <= bounds.v_max && v == 0; ++vc) {
        std::vector<std::vector<ScalarSeries>> m1(d, std::vector<ScalarSeries>(vc, zero));
        std::vector<std::vector<ScalarSeries>> m2(d, std::vector<ScalarSeries>(vc + 1, zero));
        for (long w = 0; w < vc; ++w) {
            auto col = stacked(w);
            for (std::size_t i = 0; i < d; ++i) m1[i][w] = m2[i][w] = col[i];
        }
        auto tcol = stacked(vc);
        for (std::size_t i = 0; i < d; ++i) m2[i][vc] = tcol[i];
        detail::SeriesRank r1 = detail::series_matrix_rank(m1, tau, work_order);
        detail::SeriesRank r2 = detail::series_matrix_rank(m2, tau, work_order);
        if (!r1.residue_clean || !r2.residue_clean) {
            fuzzy = true;
            continue;
        }
        if (r2.confident > r1.confident) continue;  // target confidently outside the span
        std::vector<std::vector<ScalarSeries>> columns(vc);
        for (long w = 0; w < vc; ++w) columns[w] = stacked(w);
        detail::SeriesSolve sol = detail::series_solve(columns, tcol, tau, work_order);
        if (sol.status != Verdict::kTrue) {
            fuzzy = true;
            break;
        }
        v = vc;
        span_coeffs = std::move(sol.solution);
    }
    if (v == 0) {
        res.status = fuzzy ? Verdict::kIndeterminate : Verdict::kFalse;
        return res;
    }
    res.v = v;

    // Orbit coefficients: a^(w+1)_j = g(a^w_(j-1)) + g(a^w_(v-1)) a^(v)_j.
    std::vector<std::vector<ScalarSeries>> avec{span_coeffs};
    for (long w = 1; w <= bounds.s_max; ++w) {
        const auto& prev = avec.back();
        std::vector<ScalarSeries> next(static_cast<std::size_t>(v), zero);
        ScalarSeries carry = op_gamma(prev[static_cast<std::size_t>(v - 1)], g, work_order);
        for (long j = 0; j < v; ++j) {
            ScalarSeries e = carry.mul(span_coeffs[static_cast<std::size_t>(j)], work_order);
            if (j >= 1)
                e = e.add(op_gamma(prev[static_cast<std::size_t>(j - 1)], g, work_order));
            next[static_cast<std::size_t>(j)] = e.truncate(work_order);
        }
        avec.push_back(std::move(next));
    }

    for (long s = 1; s <= bounds.s_max; ++s) {
        std::vector<std::vector<ScalarSeries>> vectors(avec.begin(), avec.begin() + s + 1);
        long k_lo = (s + v - 1) / v;
        for (long k = k_lo; k <= k_lo + 2; ++k) {
            SeriesSystem sys = make_series_system(v, k, vectors, tau, work_order);
            HypothesisReport rep = check_hypotheses(sys);
            if (rep.h1 == Verdict::kIndeterminate || rep.h2 == Verdict::kIndeterminate) {
                fuzzy = true;
                continue;
            }
            if (rep.h1 != Verdict::kTrue || rep.h2 != Verdict::kTrue) continue;
            SeriesCertificate cert = extract_constant_relation(sys);
            if (cert.status != Verdict::kTrue) {
                fuzzy = true;
                continue;
            }
            // sum_w lambda_w g^(v+w-1) y = 0; a power of g rescales nothing
            // constant, so normalize to powers 0..s.
            res.lambda = cert.lambda;
            res.residual_floor = kInfValuation;
            for (std::size_t i = 0; i < d; ++i) {
                ScalarSeries acc = zero;
                for (long w = 0; w <= s; ++w)
                    acc = acc.add(orbit[static_cast<std::size_t>(w)][i].truncate(work_order)
                                      .scale_coeff(res.lambda[static_cast<std::size_t>(w)]));
                res.residual_floor =
                    std::min(res.residual_floor,
                             acc.is_zero() ? kInfValuation : acc.valuation_floor());
            }
            res.status = res.residual_floor >= tau ? Verdict::kTrue : Verdict::kIndeterminate;
            return res;
        }
    }
    res.status = fuzzy ? Verdict::kIndeterminate : Verdict::kFalse;
    return res;
}

/// Smallest coordinatewise residual floor between two module elements.
inline long module_residual_floor(const ModuleElement& a, const ModuleElement& b) {
    if (a.size() != b.size())
        throw std::domain_error("module residual needs matching coordinate counts");
    long m = kInfValuation;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::min(m, series_residual_floor(a[i], b[i]));
    return m;
}

}  // namespace pglab

#endif  // PGLAB_PGMOD_HPP
