#ifndef PGLAB_WRONSKIAN_HPP
#define PGLAB_WRONSKIAN_HPP

/// Constant-relation solver over a computable differential field: given s+1
/// vectors whose order-(k-1) prolongations (first s vectors) are independent
/// while the order-k prolongations (all s+1) are dependent, the dependence
/// can be rewritten with constant coefficients, and this header extracts it.
///
/// Two backends are provided.  The exact one works over Q(X) with d/dX and
/// its verdicts are unconditional.  The series one works over truncated
/// Laurent series with the derivation (1+X)d/dX; there a coefficient counts
/// as zero when its valuation floor reaches a threshold tau, and any verdict
/// the data cannot support at that threshold is reported indeterminate
/// rather than guessed.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pglab/ratfunc.hpp"
#include "pglab/series.hpp"

namespace pglab {

/// Boundary representation of a differential-field element: one tag per
/// backend.  A system must be homogeneously tagged.
using DiffFieldElement = std::variant<RationalFunction, ScalarSeries>;

enum class Verdict { kFalse, kTrue, kIndeterminate };

inline std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::kFalse: return "false";
        case Verdict::kTrue: return "true";
        default: return "indeterminate";
    }
}

/// h1: the order-(k-1) prolongations of the first s vectors are independent
/// over the field.  h2: the order-k prolongations of all s+1 vectors are
/// dependent.  The exact backend never returns indeterminate.
struct HypothesisReport {
    Verdict h1 = Verdict::kIndeterminate;
    Verdict h2 = Verdict::kIndeterminate;
};

namespace detail {

/// cache[w][i] = componentwise i-th derivative of vector w, for i <= k.
template <class H, class D>
std::vector<std::vector<std::vector<H>>> prolongation_cache(
    const std::vector<std::vector<H>>& vectors, long k, D deriv) {
    std::vector<std::vector<std::vector<H>>> cache(vectors.size());
    for (std::size_t w = 0; w < vectors.size(); ++w) {
        cache[w].resize(static_cast<std::size_t>(k) + 1);
        cache[w][0] = vectors[w];
        for (long i = 1; i <= k; ++i) {
            auto& prev = cache[w][static_cast<std::size_t>(i - 1)];
            auto& cur = cache[w][static_cast<std::size_t>(i)];
            cur.reserve(prev.size());
            for (const H& h : prev) cur.push_back(deriv(h));
        }
    }
    return cache;
}

/// Row-major matrix whose columns are the order-L prolongations of the
/// vectors with indices in [w_lo, w_hi).
template <class H>
std::vector<std::vector<H>> prolongation_matrix(
    const std::vector<std::vector<std::vector<H>>>& cache, long v, long L, std::size_t w_lo,
    std::size_t w_hi, const H& zero) {
    std::size_t rows = static_cast<std::size_t>((L + 1) * v);
    std::vector<std::vector<H>> m(rows, std::vector<H>(w_hi - w_lo, zero));
    for (std::size_t w = w_lo; w < w_hi; ++w)
        for (long i = 0; i <= L; ++i)
            for (long j = 0; j < v; ++j)
                m[static_cast<std::size_t>(i * v + j)][w - w_lo] =
                    cache[w][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

/// Fraction-free rank of a polynomial matrix.  Cross-multiplied updates are
/// divided by the previous pivot when that division is exact (it is along
/// the uninterrupted pivot path); otherwise the undivided value is kept,
/// which only affects entry growth, never the rank.
inline long qpoly_matrix_rank(std::vector<std::vector<QPoly>> m) {
    if (m.empty() || m[0].empty()) return 0;
    std::size_t rows = m.size(), cols = m[0].size();
    QPoly prev{mpq_class(1)};
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pr = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (!m[i][c].empty()) {
                pr = i;
                break;
            }
        if (pr == rows) continue;
        std::swap(m[pr], m[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                QPoly t = poly_sub(poly_mul(m[i][j], m[r][c]), poly_mul(m[i][c], m[r][j]));
                auto [q, rem] = poly_divmod(t, prev);
                m[i][j] = rem.empty() ? std::move(q) : std::move(t);
            }
            m[i][c].clear();
        }
        prev = m[r][c];
        ++r;
    }
    return static_cast<long>(r);
}

/// Clears denominators columnwise: scaling a column by a nonzero polynomial
/// changes neither independence nor rank over the fraction field.
inline std::vector<std::vector<QPoly>> cleared_columns(
    const std::vector<std::vector<RationalFunction>>& m) {
    if (m.empty()) return {};
    std::size_t rows = m.size(), cols = m[0].size();
    std::vector<std::vector<QPoly>> out(rows, std::vector<QPoly>(cols));
    for (std::size_t c = 0; c < cols; ++c) {
        QPoly l{mpq_class(1)};
        for (std::size_t i = 0; i < rows; ++i) {
            const QPoly& d = m[i][c].den();
            l = poly_divexact(poly_mul(l, d), poly_gcd(l, d));
        }
        for (std::size_t i = 0; i < rows; ++i)
            out[i][c] = poly_mul(m[i][c].num(), poly_divexact(l, m[i][c].den()));
    }
    return out;
}

}  // namespace detail

/// Prolongation data over Q(X): s+1 vectors of length v, derivation order k,
/// and the cached derivatives the rank tests and the solver read.
struct RationalSystem {
    long v = 1;
    long k = 1;
    std::vector<std::vector<RationalFunction>> vectors;
    std::vector<std::vector<std::vector<RationalFunction>>> derivs;
};

inline RationalSystem make_rational_system(long v, long k,
                                           std::vector<std::vector<RationalFunction>> vectors) {
    if (v < 1 || k < 1) throw std::domain_error("prolongation system needs v >= 1 and k >= 1");
    if (vectors.size() < 2) throw std::domain_error("prolongation system needs at least two vectors");
    for (const auto& x : vectors)
        if (static_cast<long>(x.size()) != v)
            throw std::domain_error("prolongation system vector has the wrong dimension");
    RationalSystem sys;
    sys.v = v;
    sys.k = k;
    sys.vectors = std::move(vectors);
    sys.derivs = detail::prolongation_cache(sys.vectors, k,
                                            [](const RationalFunction& h) { return h.derivative(); });
    return sys;
}

inline HypothesisReport check_hypotheses(const RationalSystem& sys) {
    std::size_t s = sys.vectors.size() - 1;
    RationalFunction zero;
    auto m1 = detail::prolongation_matrix(sys.derivs, sys.v, sys.k - 1, 0, s, zero);
    auto m2 = detail::prolongation_matrix(sys.derivs, sys.v, sys.k, 0, s + 1, zero);
    HypothesisReport rep;
    rep.h1 = detail::qpoly_matrix_rank(detail::cleared_columns(m1)) == static_cast<long>(s)
                 ? Verdict::kTrue
                 : Verdict::kFalse;
    rep.h2 = detail::qpoly_matrix_rank(detail::cleared_columns(m2)) <= static_cast<long>(s)
                 ? Verdict::kTrue
                 : Verdict::kFalse;
    return rep;
}

/// Exact solve of (columns) x = target over Q(X) by Gauss-Jordan
/// elimination.  Free variables are set to zero; an inconsistent system is
/// an error.
inline std::vector<RationalFunction> solve_in_H(
    const std::vector<std::vector<RationalFunction>>& columns,
    const std::vector<RationalFunction>& target) {
    std::size_t cols = columns.size(), rows = target.size();
    for (const auto& col : columns)
        if (col.size() != rows) throw std::domain_error("linear system with ragged columns");
    std::vector<std::vector<RationalFunction>> aug(rows,
                                                   std::vector<RationalFunction>(cols + 1));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < cols; ++c) aug[i][c] = columns[c][i];
        aug[i][cols] = target[i];
    }
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pr = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (!aug[i][c].is_zero()) {
                pr = i;
                break;
            }
        if (pr == rows) continue;
        std::swap(aug[pr], aug[r]);
        RationalFunction inv = aug[r][c].inv();
        for (std::size_t j = c; j <= cols; ++j) aug[r][j] = aug[r][j].mul(inv);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || aug[i][c].is_zero()) continue;
            RationalFunction f = aug[i][c];
            for (std::size_t j = c; j <= cols; ++j) aug[i][j] = aug[i][j].sub(f.mul(aug[r][j]));
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (!aug[i][cols].is_zero())
            throw std::domain_error("inconsistent linear system over the differential field");
    std::vector<RationalFunction> x(cols);
    for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = aug[i][cols];
    return x;
}

/// Constant relation certified over Q(X): sum lambda_w x_w = 0 exactly, the
/// last coefficient normalized to 1, and the derivation annihilating every
/// lambda by construction since they are literal rationals.
struct RationalCertificate {
    std::vector<mpq_class> lambda;
    bool residual_zero = false;
    long residual_degree = -1;  // degree of the largest nonzero residual component, -1 when zero
    HypothesisReport hypotheses;
};

inline RationalCertificate extract_constant_relation(const RationalSystem& sys) {
    HypothesisReport hyps = check_hypotheses(sys);
    if (hyps.h1 != Verdict::kTrue)
        throw std::domain_error("independence hypothesis at order k-1 fails");
    if (hyps.h2 != Verdict::kTrue)
        throw std::domain_error("dependence hypothesis at order k fails");
    std::size_t s = sys.vectors.size() - 1;
    RationalFunction zero;
    auto lhs = detail::prolongation_matrix(sys.derivs, sys.v, sys.k, 0, s, zero);
    auto rhs_m = detail::prolongation_matrix(sys.derivs, sys.v, sys.k, s, s + 1, zero);
    std::vector<std::vector<RationalFunction>> columns(s);
    std::vector<RationalFunction> target(lhs.size());
    for (std::size_t c = 0; c < s; ++c) {
        columns[c].resize(lhs.size());
        for (std::size_t i = 0; i < lhs.size(); ++i) columns[c][i] = lhs[i][c];
    }
    for (std::size_t i = 0; i < lhs.size(); ++i) target[i] = rhs_m[i][0].neg();
    std::vector<RationalFunction> sol = solve_in_H(columns, target);
    RationalCertificate cert;
    cert.hypotheses = hyps;
    cert.lambda.reserve(s + 1);
    for (const auto& l : sol) {
        if (!l.is_constant())
            throw std::logic_error("relation coefficients are not constant although the hypotheses hold");
        cert.lambda.push_back(l.constant_value());
    }
    cert.lambda.push_back(mpq_class(1));
    cert.residual_zero = true;
    for (long j = 0; j < sys.v; ++j) {
        RationalFunction acc;
        for (std::size_t w = 0; w <= s; ++w)
            acc = acc.add(sys.vectors[w][static_cast<std::size_t>(j)].scale(cert.lambda[w]));
        if (!acc.is_zero()) {
            cert.residual_zero = false;
            cert.residual_degree =
                std::max(cert.residual_degree,
                         detail::poly_degree(acc.num()) - detail::poly_degree(acc.den()));
        }
    }
    return cert;
}

namespace detail {

/// Minimal valuation among confidently nonzero coefficients, if any.
inline std::optional<long> confident_valuation(const ScalarSeries& e) {
    std::optional<long> best;
    for (long j = e.n_min(); j < e.support_end(); ++j) {
        const PadicNumber& c = e.coeff(j);
        if (c.is_zero()) continue;
        if (!best || c.valuation() < *best) best = c.valuation();
    }
    return best;
}

/// Zero at threshold: every stored coefficient sits at valuation >= tau.
inline bool zero_at_threshold(const ScalarSeries& e, long tau) {
    return e.valuation_floor() >= tau;
}

/// A pivot the series solver may divide by: the leading not-provably-zero
/// coefficient must be confidently nonzero, and somewhere the entry must be
/// confident below tau.
inline bool invertible_pivot(const ScalarSeries& e, long tau) {
    auto lo = e.first_meaningful_exponent();
    if (!lo) return false;
    if (e.coeff(*lo).is_zero()) return false;
    auto cv = confident_valuation(e);
    return cv && *cv < tau;
}

struct SeriesRank {
    long confident = 0;
    bool residue_clean = true;  // everything left after elimination is zero at threshold
};

/// Valuation-pivoted elimination without division: the pivot is the entry
/// with the smallest confident valuation below tau and rows are updated by
/// cross-multiplication, so a fuzzy remainder can only hide rank, never
/// invent it.
inline SeriesRank series_matrix_rank(std::vector<std::vector<ScalarSeries>> m, long tau,
                                     long work_order) {
    SeriesRank out;
    if (m.empty() || m[0].empty()) return out;
    std::size_t rows = m.size(), cols = m[0].size();
    std::vector<bool> row_done(rows, false), col_done(cols, false);
    for (;;) {
        std::size_t pr = rows, pc = cols;
        long best = kInfValuation;
        for (std::size_t i = 0; i < rows; ++i) {
            if (row_done[i]) continue;
            for (std::size_t c = 0; c < cols; ++c) {
                if (col_done[c]) continue;
                auto cv = confident_valuation(m[i][c]);
                if (cv && *cv < tau && *cv < best) {
                    best = *cv;
                    pr = i;
                    pc = c;
                }
            }
        }
        if (pr == rows) break;
        ++out.confident;
        row_done[pr] = true;
        col_done[pc] = true;
        const ScalarSeries& pivot = m[pr][pc];
        for (std::size_t i = 0; i < rows; ++i) {
            if (row_done[i] || zero_at_threshold(m[i][pc], tau)) continue;
            const ScalarSeries f = m[i][pc];
            for (std::size_t c = 0; c < cols; ++c) {
                if (col_done[c]) continue;
                m[i][c] = m[i][c].mul(pivot, work_order).sub(f.mul(m[pr][c], work_order));
            }
            m[i][pc] = ScalarSeries(pivot.zero_prototype(), 0, 0);
        }
    }
    for (std::size_t i = 0; i < rows && out.residue_clean; ++i) {
        if (row_done[i]) continue;
        for (std::size_t c = 0; c < cols; ++c)
            if (!col_done[c] && !zero_at_threshold(m[i][c], tau)) {
                out.residue_clean = false;
                break;
            }
    }
    return out;
}

struct SeriesSolve {
    Verdict status = Verdict::kIndeterminate;
    std::vector<ScalarSeries> solution;
};

/// Gaussian elimination with division over the truncated series field.  The
/// pivot must be confidently invertible; if the elimination gets stuck on
/// fuzz, or a pivotless row keeps a right side confidently below tau, the
/// solve is indeterminate rather than forced.
inline SeriesSolve series_solve(const std::vector<std::vector<ScalarSeries>>& columns,
                                const std::vector<ScalarSeries>& target, long tau,
                                long work_order) {
    SeriesSolve out;
    std::size_t cols = columns.size(), rows = target.size();
    ScalarSeries zero = target.empty() ? ScalarSeries(PadicNumber::zero(2), 0, 0)
                                       : ScalarSeries(target[0].zero_prototype(), 0, 0);
    std::vector<std::vector<ScalarSeries>> aug(rows, std::vector<ScalarSeries>(cols + 1, zero));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < cols; ++c) aug[i][c] = columns[c][i];
        aug[i][cols] = target[i];
    }
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        // Dividing by a pivot whose leading coefficient sits above the
        // entry's minimal valuation loses that gap per X-power across the
        // window, so the search minimizes the gap first, the leading
        // valuation second.
        std::size_t pr = rows;
        long best_gap = kInfValuation;
        long best_lead = kInfValuation;
        bool fuzzy = false;
        for (std::size_t i = r; i < rows; ++i) {
            if (invertible_pivot(aug[i][c], tau)) {
                long lead = aug[i][c].coeff(*aug[i][c].first_meaningful_exponent()).valuation();
                long gap = lead - *confident_valuation(aug[i][c]);
                if (gap < best_gap || (gap == best_gap && lead < best_lead)) {
                    best_gap = gap;
                    best_lead = lead;
                    pr = i;
                }
            } else if (!zero_at_threshold(aug[i][c], tau)) {
                fuzzy = true;
            }
        }
        if (pr == rows) {
            if (fuzzy) return out;  // cannot place or exclude a pivot at this threshold
            continue;
        }
        std::swap(aug[pr], aug[r]);
        ScalarSeries inv = aug[r][c].invert(work_order);
        for (std::size_t j = c; j <= cols; ++j) aug[r][j] = aug[r][j].mul(inv, work_order);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || zero_at_threshold(aug[i][c], tau)) continue;
            const ScalarSeries f = aug[i][c];
            for (std::size_t j = c; j <= cols; ++j)
                aug[i][j] = aug[i][j].sub(f.mul(aug[r][j], work_order));
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (!zero_at_threshold(aug[i][cols], tau)) return out;
    out.solution.assign(cols, zero);
    for (std::size_t i = 0; i < pivot_col.size(); ++i) out.solution[pivot_col[i]] = aug[i][cols];
    out.status = Verdict::kTrue;
    return out;
}

}  // namespace detail

/// Prolongation data over the truncated series field, with the derivation
/// (1+X)d/dX, the zero threshold tau, and the common working window used by
/// products and inversions during elimination.
struct SeriesSystem {
    long v = 1;
    long k = 1;
    long tau = 20;
    long work_order = 32;
    std::vector<std::vector<ScalarSeries>> vectors;
    std::vector<std::vector<std::vector<ScalarSeries>>> derivs;
};

inline SeriesSystem make_series_system(long v, long k, std::vector<std::vector<ScalarSeries>> vectors,
                                       long tau, long work_order = -1) {
    if (v < 1 || k < 1) throw std::domain_error("prolongation system needs v >= 1 and k >= 1");
    if (vectors.size() < 2) throw std::domain_error("prolongation system needs at least two vectors");
    for (const auto& x : vectors)
        if (static_cast<long>(x.size()) != v)
            throw std::domain_error("prolongation system vector has the wrong dimension");
    if (work_order < 0) {
        long w = kInfValuation;
        long span = 1;
        for (const auto& x : vectors)
            for (const auto& h : x) {
                if (!h.is_exact()) w = std::min(w, h.order());
                span = std::max(span, h.support_end());
            }
        work_order = w == kInfValuation ? span + 4 : w;
    }
    SeriesSystem sys;
    sys.v = v;
    sys.k = k;
    sys.tau = tau;
    sys.work_order = work_order;
    sys.vectors = std::move(vectors);
    for (auto& x : sys.vectors)
        for (auto& h : x) h = h.truncate(work_order);
    sys.derivs = detail::prolongation_cache(sys.vectors, k,
                                            [](const ScalarSeries& h) { return s_partial(h); });
    return sys;
}

inline HypothesisReport check_hypotheses(const SeriesSystem& sys) {
    std::size_t s = sys.vectors.size() - 1;
    ScalarSeries zero(sys.vectors[0][0].zero_prototype(), 0, 0);
    auto m1 = detail::prolongation_matrix(sys.derivs, sys.v, sys.k - 1, 0, s, zero);
    auto m2 = detail::prolongation_matrix(sys.derivs, sys.v, sys.k, 0, s + 1, zero);
    detail::SeriesRank r1 = detail::series_matrix_rank(m1, sys.tau, sys.work_order);
    detail::SeriesRank r2 = detail::series_matrix_rank(m2, sys.tau, sys.work_order);
    HypothesisReport rep;
    if (r1.confident == static_cast<long>(s))
        rep.h1 = Verdict::kTrue;
    else
        rep.h1 = r1.residue_clean ? Verdict::kFalse : Verdict::kIndeterminate;
    if (r2.confident == static_cast<long>(s) + 1)
        rep.h2 = Verdict::kFalse;
    else
        rep.h2 = r2.residue_clean ? Verdict::kTrue : Verdict::kIndeterminate;
    return rep;
}

/// Constant relation certified at a valuation threshold: lambda are scalars
/// at precision, the last normalized to 1; residual_floor bounds sum
/// lambda_w x_w and constancy_floor bounds the derivation applied to the
/// solved coefficients.  status is kTrue only when both floors reach tau.
struct SeriesCertificate {
    Verdict status = Verdict::kIndeterminate;
    std::vector<PadicNumber> lambda;
    long residual_floor = 0;
    long constancy_floor = 0;
    long tau = 0;
    long work_order = 0;
    HypothesisReport hypotheses;
};

inline SeriesCertificate extract_constant_relation(const SeriesSystem& sys) {
    SeriesCertificate cert;
    cert.tau = sys.tau;
    cert.work_order = sys.work_order;
    cert.hypotheses = check_hypotheses(sys);
    if (cert.hypotheses.h1 == Verdict::kFalse)
        throw std::domain_error("independence hypothesis at order k-1 fails");
    if (cert.hypotheses.h2 == Verdict::kFalse)
        throw std::domain_error("dependence hypothesis at order k fails");
    if (cert.hypotheses.h1 != Verdict::kTrue || cert.hypotheses.h2 != Verdict::kTrue) return cert;
    std::size_t s = sys.vectors.size() - 1;
    ScalarSeries zero(sys.vectors[0][0].zero_prototype(), 0, 0);
    auto lhs = detail::prolongation_matrix(sys.derivs, sys.v, sys.k, 0, s, zero);
    auto rhs_m = detail::prolongation_matrix(sys.derivs, sys.v, sys.k, s, s + 1, zero);
    std::vector<std::vector<ScalarSeries>> columns(s);
    std::vector<ScalarSeries> target;
    target.reserve(lhs.size());
    for (std::size_t c = 0; c < s; ++c) {
        columns[c].reserve(lhs.size());
        for (std::size_t i = 0; i < lhs.size(); ++i) columns[c].push_back(lhs[i][c]);
    }
    for (std::size_t i = 0; i < lhs.size(); ++i) target.push_back(rhs_m[i][0].neg());
    detail::SeriesSolve sol = detail::series_solve(columns, target, sys.tau, sys.work_order);
    if (sol.status != Verdict::kTrue) return cert;
    long p = sys.vectors[0][0].zero_prototype().prime();
    long digits = detail::working_digits(sys.vectors[0][0]);
    cert.constancy_floor = kInfValuation;
    cert.lambda.reserve(s + 1);
    for (const auto& l : sol.solution) {
        cert.constancy_floor = std::min(cert.constancy_floor, s_partial(l).valuation_floor());
        PadicNumber scalar = l.n_min() <= 0 && l.support_end() > 0 ? l.coeff(0) : PadicNumber::zero(p);
        cert.lambda.push_back(scalar);
    }
    cert.lambda.push_back(PadicNumber::one(p, digits));
    cert.residual_floor = kInfValuation;
    for (long j = 0; j < sys.v; ++j) {
        ScalarSeries acc = zero;
        for (std::size_t w = 0; w <= s; ++w)
            acc = acc.add(
                sys.vectors[w][static_cast<std::size_t>(j)].scale_coeff(cert.lambda[w]));
        cert.residual_floor = std::min(cert.residual_floor, acc.valuation_floor());
    }
    cert.status = cert.residual_floor >= sys.tau && cert.constancy_floor >= sys.tau
                      ? Verdict::kTrue
                      : Verdict::kIndeterminate;
    return cert;
}

}  // namespace pglab

#endif  // PGLAB_WRONSKIAN_HPP
