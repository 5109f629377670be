#ifndef PGLAB_LINALG_HPP
#define PGLAB_LINALG_HPP

/// Dense linear algebra over Q_p at working precision.
///
/// Pivoting always selects the candidate of smallest valuation, which is the
/// p-adically largest entry; this keeps unit divisions honest and makes the
/// tracked precision of results meaningful.

#include <optional>
#include <vector>

#include "pglab/padic.hpp"

namespace pglab {

using PadicMatrix = std::vector<std::vector<PadicNumber>>;

namespace detail {

/// Row-reduce in place; returns column index of each pivot row and permutation sign.
/// Entries indistinguishable from zero are treated as zero.  If a column has no
/// confident pivot but holds an inexact zero that could hide one, the reduction
/// records ambiguity.
struct Elimination {
    PadicMatrix a;
    std::vector<long> pivot_col;
    std::vector<PadicNumber> pivots;
    bool ambiguous = false;
};

inline Elimination eliminate(PadicMatrix a) {
    Elimination e;
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t best = rows;
        for (std::size_t i = r; i < rows; ++i) {
            if (a[i][c].is_regular() &&
                (best == rows || a[i][c].valuation() < a[best][c].valuation()))
                best = i;
        }
        if (best == rows) {
            for (std::size_t i = r; i < rows; ++i)
                if (a[i][c].is_inexact_zero()) e.ambiguous = true;
            continue;
        }
        std::swap(a[r], a[best]);
        PadicNumber inv = a[r][c].inv();
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (a[i][c].is_zero()) continue;
            PadicNumber f = a[i][c].mul(inv);
            for (std::size_t j = c; j < cols; ++j)
                a[i][j] = a[i][j].sub(f.mul(a[r][j]));
        }
        e.pivot_col.push_back(static_cast<long>(c));
        e.pivots.push_back(a[r][c]);
        ++r;
    }
    e.a = std::move(a);
    return e;
}

}  // namespace detail

/// Solve A x = b (A square, full rank at working precision).
inline std::vector<PadicNumber> padic_solve(const PadicMatrix& a_in,
                                            const std::vector<PadicNumber>& b, long p) {
    const std::size_t n = a_in.size();
    if (n == 0) return {};
    PadicMatrix a = a_in;
    for (std::size_t i = 0; i < n; ++i) a[i].push_back(b[i]);
    auto e = detail::eliminate(std::move(a));
    std::size_t rank = 0;
    for (long c : e.pivot_col)
        if (c < static_cast<long>(n)) ++rank;
    if (rank < n) {
        if (e.ambiguous)
            throw precision_error("padic_solve: pivot hidden below working precision");
        throw std::domain_error("padic_solve: matrix singular at working precision");
    }
    std::vector<PadicNumber> x(n, PadicNumber::zero(p));
    for (std::size_t ii = n; ii-- > 0;) {
        long c = e.pivot_col[ii];
        PadicNumber acc = e.a[ii][n];
        for (std::size_t j = c + 1; j < n; ++j) acc = acc.sub(e.a[ii][j].mul(x[j]));
        x[c] = acc.div(e.a[ii][c]);
    }
    return x;
}

/// Determinant valuation: sum of pivot valuations, or nullopt when the matrix
/// is singular at working precision.
inline std::optional<long> padic_det_valuation(const PadicMatrix& a) {
    if (a.empty()) return 0;
    auto e = detail::eliminate(a);
    if (e.pivots.size() < a.size()) {
        if (e.ambiguous)
            throw precision_error("padic_det_valuation: rank not determined at working precision");
        return std::nullopt;
    }
    long v = 0;
    for (const auto& piv : e.pivots) v += piv.valuation();
    return v;
}

/// Rank at working precision.
inline std::size_t padic_rank(const PadicMatrix& a) {
    auto e = detail::eliminate(a);
    if (e.ambiguous) throw precision_error("padic_rank: rank not determined at working precision");
    return e.pivots.size();
}

}  // namespace pglab

#endif  // PGLAB_LINALG_HPP
