#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "schurlim/det_asymptotics.hpp"
#include "schurlim/linalg.hpp"
#include "schurlim/matrix.hpp"

namespace schurlim {

enum class Provenance { explicit_series, lyapunov_generated, user_sequence };

/// A family m -> Sigma^(m) of symmetric matrices admitting the expansion
/// Sigma^(m) = Sigma + Sigma^(1,inf)/m + o(1/m), together with the extracted
/// (or supplied) limit and first-order coefficient.
struct PerturbationFamily {
    std::size_t p = 0;
    Matrix sigma_limit;
    Matrix sigma_first_order;
    std::function<Matrix(double)> evaluate;
    Provenance provenance = Provenance::user_sequence;
};

/// Family defined directly by its series coefficients: evaluate(m) = Sigma + G/m.
inline PerturbationFamily series_family(Matrix sigma, Matrix first_order,
                                        Provenance provenance = Provenance::user_sequence,
                                        double sym_tol = 1e-9) {
    if (!sigma.is_square() || sigma.rows() != first_order.rows() ||
        !first_order.is_square()) {
        throw dimension_error("series_family: Sigma and Sigma^(1,inf) must be square and equal-sized");
    }
    if (!is_symmetric(sigma, sym_tol) || !is_symmetric(first_order, sym_tol))
        throw symmetry_error("series_family: inputs must be symmetric");
    PerturbationFamily fam;
    fam.p = sigma.rows();
    fam.sigma_limit = sigma;
    fam.sigma_first_order = first_order;
    fam.provenance = provenance;
    fam.evaluate = [sigma = std::move(sigma), g = std::move(first_order)](double m) {
        return sigma + (1.0 / m) * g;
    };
    return fam;
}

struct SeriesExtraction {
    Matrix sigma;
    Matrix sigma_first_order;
    double anchor_m = 0.0;
    std::vector<std::pair<double, double>> residuals;  // (m, ||E(m) - Sigma - G/m||_max)
};

namespace detail {

/// Quadratic-in-1/m fit from evaluations at anchor, 2*anchor, 4*anchor;
/// returns the constant and linear coefficient matrices.
inline std::pair<Matrix, Matrix> richardson_fit(const std::function<Matrix(double)>& evaluate,
                                                double anchor) {
    const Matrix e1 = evaluate(anchor);
    const Matrix e2 = evaluate(2.0 * anchor);
    const Matrix e4 = evaluate(4.0 * anchor);
    const std::size_t p = e1.rows();
    if (!e1.is_square() || e2.rows() != p || e2.cols() != p || e4.rows() != p || e4.cols() != p)
        throw dimension_error("extract_series: generator output shape is inconsistent");
    const double x1 = 1.0 / anchor, x2 = 0.5 / anchor, x3 = 0.25 / anchor;
    const Matrix vand(3, 3, {1.0, x1, x1 * x1, 1.0, x2, x2 * x2, 1.0, x3, x3 * x3});
    Matrix rhs(3, p * p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            rhs(0, i * p + j) = e1(i, j);
            rhs(1, i * p + j) = e2(i, j);
            rhs(2, i * p + j) = e4(i, j);
        }
    const Matrix coef = solve(vand, rhs);
    Matrix sigma(p, p), first(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            sigma(i, j) = coef(0, i * p + j);
            first(i, j) = coef(1, i * p + j);
        }
    return {std::move(sigma), std::move(first)};
}

}  // namespace detail

/// Recover (Sigma, Sigma^(1,inf)) from a generator by Richardson-style
/// quadratic fits in 1/m at the largest grid value and its doublings. A second
/// fit two decades lower must agree with the first (a family that is not of
/// the form Sigma + G/m + o(1/m) produces anchor-dependent coefficients), and
/// the grid residuals must not plateau; both failures raise extraction_error.
inline SeriesExtraction extract_series(const std::function<Matrix(double)>& evaluate,
                                       const std::vector<double>& m_grid) {
    if (m_grid.size() < 3) throw extraction_error("extract_series: need at least 3 grid values");
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        if (m_grid[i] <= 0.0 || (i > 0 && m_grid[i] <= m_grid[i - 1]))
            throw extraction_error("extract_series: grid must be positive and increasing");
    }
    if (m_grid.back() < 100.0 * m_grid.front())
        throw extraction_error("extract_series: grid must span at least two decades");
    const double anchor_hi = m_grid.back();
    double anchor_lo = m_grid.front();
    for (double m : m_grid)
        if (m <= anchor_hi / 100.0) anchor_lo = m;
    auto [sigma_hi, first_hi] = detail::richardson_fit(evaluate, anchor_hi);
    auto [sigma_lo, first_lo] = detail::richardson_fit(evaluate, anchor_lo);

    const double sigma_gap = (sigma_hi - sigma_lo).max_norm();
    const double first_gap = (first_hi - first_lo).max_norm();
    const double g_scale = std::max(first_hi.max_norm(), first_lo.max_norm());
    if (sigma_gap > 1e-6 * (1.0 + sigma_hi.max_norm()) || first_gap > 1e-4 * (1.0 + g_scale))
        throw extraction_error(
            "extract_series: coefficients depend on the anchor; family is not of the form "
            "Sigma + G/m + o(1/m)");

    SeriesExtraction out;
    out.anchor_m = anchor_hi;
    out.sigma = std::move(sigma_hi);
    out.sigma_first_order = std::move(first_hi);
    for (double m : m_grid) {
        const double r =
            (evaluate(m) - out.sigma - (1.0 / m) * out.sigma_first_order).max_norm();
        out.residuals.emplace_back(m, r);
    }
    // gross non-decay guard on the residuals away from the interpolation nodes
    const double r_first = out.residuals.front().second;
    const double r_mid = out.residuals[m_grid.size() - 2].second;
    if (r_mid > 0.7 * r_first + 1e-9 * (1.0 + out.sigma.max_norm()))
        throw extraction_error(
            "extract_series: residuals do not decay; family is not of the assumed form");
    return out;
}

/// Family backed by a generator; coefficients are extracted numerically.
inline PerturbationFamily extracted_family(std::function<Matrix(double)> evaluate,
                                           const std::vector<double>& m_grid,
                                           Provenance provenance = Provenance::lyapunov_generated) {
    auto ext = extract_series(evaluate, m_grid);
    PerturbationFamily fam;
    fam.p = ext.sigma.rows();
    fam.sigma_limit = std::move(ext.sigma);
    fam.sigma_first_order = std::move(ext.sigma_first_order);
    fam.evaluate = std::move(evaluate);
    fam.provenance = provenance;
    return fam;
}

enum class Verdict { converges_by_theorem, conditions_violated, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::converges_by_theorem: return "converges-by-theorem";
        case Verdict::conditions_violated: return "conditions-violated";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

struct EmpiricalRow {
    double m = 0.0;
    double error = 0.0;   // ||Sigma^(m)_{R|S} - limit||_max
    bool available = true;  // false when Sigma^(m)_{S,S} is singular at this m
};

struct TheoremReport {
    double condition_i_value = 0.0;  // f(U, Sigma^(1,inf)_{S,S})
    bool condition_i_holds = false;
    bool condition_ii_holds = false;
    std::size_t rank_r = 0;
    Matrix limit_conditional;
    std::vector<EmpiricalRow> empirical_table;
    Verdict verdict = Verdict::inconclusive;
};

struct CheckOptions {
    double rank_tol = 1e-9;
    double f_tol_rel = 1e-8;  // condition (i) threshold, relative to ||G_SS||_max^(k-r)
    double col_tol = 1e-8;    // condition (ii) residual tolerance
    double sym_tol = 1e-9;
    /// Optional externally supplied rank decomposition of Sigma_SS; the
    /// default is the eigendecomposition-based one. The verdict is invariant
    /// under this choice, the raw condition-(i) value scales by det(C)^2.
    std::optional<RankDecomposition> decomposition;
};

namespace detail {

inline RankDecomposition resolve_decomposition(const Matrix& sss, const CheckOptions& opt) {
    if (!opt.decomposition) return symmetric_rank_decomposition(sss, opt.rank_tol, opt.sym_tol);
    const RankDecomposition& d = *opt.decomposition;
    if (d.u.rows() != sss.rows() || d.u.cols() != d.rank || d.b.rows() != d.rank ||
        d.b.cols() != d.rank)
        throw dimension_error("check_theorem: supplied decomposition has inconsistent shapes");
    const double resid = (sss - d.u * d.b * d.u.transpose()).max_norm();
    if (resid > 1e-6 * (1.0 + sss.max_norm()))
        throw structure_error("check_theorem: supplied decomposition does not reconstruct Sigma_SS");
    return d;
}

inline double condition_i_threshold(const Matrix& g_ss, std::size_t order, double f_tol_rel) {
    return f_tol_rel * int_pow(g_ss.max_norm(), static_cast<int>(order));
}

}  // namespace detail

/// Run the convergence theorem on a family: rank-decompose Sigma_SS, test
/// condition (i) via the subset-sum functional on Sigma^(1,inf)_SS, test the
/// column-space inclusion (ii), compute the limit Schur complement through the
/// pseudoinverse, and tabulate the true-inverse Schur complements along m_grid.
inline TheoremReport check_theorem(const PerturbationFamily& fam, const IndexSet& s_set,
                                   const IndexSet& r_set, const std::vector<double>& m_grid,
                                   const CheckOptions& opt = {}) {
    const int p = static_cast<int>(fam.p);
    if (s_set.max_index() > p || r_set.max_index() > p)
        throw index_error("check_theorem: index out of range");
    if (!s_set.disjoint_with(r_set)) throw index_error("check_theorem: S and R must be disjoint");
    if (r_set.empty()) throw index_error("check_theorem: target set R is empty");
    if (s_set.size() >= fam.p) throw index_error("check_theorem: |S| must be smaller than p");

    TheoremReport rep;
    const std::size_t k = s_set.size();
    const Matrix sss = submatrix(fam.sigma_limit, s_set, s_set);
    const Matrix g_ss = submatrix(fam.sigma_first_order, s_set, s_set);
    const RankDecomposition decomp = detail::resolve_decomposition(sss, opt);
    rep.rank_r = decomp.rank;

    if (decomp.rank == k) {
        // nonsingular Sigma_SS: conditions hold trivially, f reduces to the
        // empty-alpha convention det(U)^2
        rep.condition_i_value = detail::f_asy_core(decomp.u, decomp.u, g_ss);
        rep.condition_i_holds = true;
        rep.condition_ii_holds = true;
    } else {
        rep.condition_i_value = detail::f_asy_core(decomp.u, decomp.u, g_ss);
        const double f_tol =
            detail::condition_i_threshold(g_ss, k - decomp.rank, opt.f_tol_rel);
        rep.condition_i_holds = std::abs(rep.condition_i_value) > f_tol;
        rep.condition_ii_holds = column_space_contains(
            sss, submatrix(fam.sigma_limit, s_set, r_set), opt.col_tol, opt.rank_tol);
    }

    const Matrix srr = submatrix(fam.sigma_limit, r_set, r_set);
    if (k == 0) {
        rep.limit_conditional = srr;
    } else {
        const Matrix srs = submatrix(fam.sigma_limit, r_set, s_set);
        const Matrix ssr = submatrix(fam.sigma_limit, s_set, r_set);
        rep.limit_conditional = srr - srs * pseudoinverse_from_decomposition(decomp) * ssr;
    }

    std::vector<double> grid = m_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (double m : grid) {
        EmpiricalRow row;
        row.m = m;
        const Matrix em = fam.evaluate(m);
        const Matrix err_rr = submatrix(em, r_set, r_set);
        if (k == 0) {
            row.error = (err_rr - rep.limit_conditional).max_norm();
        } else {
            auto lu = detail::lu_factor(submatrix(em, s_set, s_set));
            if (lu.singular) {
                row.available = false;
            } else {
                const Matrix schur =
                    err_rr - submatrix(em, r_set, s_set) *
                                 detail::lu_solve(lu, submatrix(em, s_set, r_set));
                row.error = (schur - rep.limit_conditional).max_norm();
            }
        }
        rep.empirical_table.push_back(row);
    }

    if (!rep.condition_i_holds || !rep.condition_ii_holds) {
        rep.verdict = Verdict::conditions_violated;
    } else if (decomp.rank < k &&
               std::abs(rep.condition_i_value) <=
                   10.0 * detail::condition_i_threshold(g_ss, k - decomp.rank, opt.f_tol_rel)) {
        rep.verdict = Verdict::inconclusive;
    } else {
        rep.verdict = Verdict::converges_by_theorem;
    }
    return rep;
}

/// Factorization Sigma_SS = U B V^T for the asymmetric variant.
struct AsymmetricFactors {
    Matrix u;
    Matrix b;
    Matrix v;
};

struct AsymmetricReport {
    double f_asy_value = 0.0;
    bool f_nonzero = false;
    bool column_space_ok = false;  // im(Sigma_SR) subset of im(Sigma_SS)
    bool row_space_ok = false;     // im(Sigma_RS^T) subset of im(Sigma_SS^T)
    std::size_t rank_r = 0;
    bool accepted = false;
    Matrix limit_conditional;
};

/// Variant of the theorem without symmetry: requires both image inclusions and
/// f_asy(U, V, G_SS) != 0 for a factorization Sigma_SS = U B V^T. Shares the
/// subset-sum functional with the symmetric path but is never called by it.
inline AsymmetricReport check_theorem_asymmetric(const Matrix& sigma_limit,
                                                 const Matrix& sigma_first_order,
                                                 const IndexSet& s_set, const IndexSet& r_set,
                                                 const std::optional<AsymmetricFactors>& factors = {},
                                                 const CheckOptions& opt = {}) {
    if (!sigma_limit.is_square() || sigma_first_order.rows() != sigma_limit.rows())
        throw dimension_error("check_theorem_asymmetric: shape mismatch");
    const int p = static_cast<int>(sigma_limit.rows());
    if (s_set.max_index() > p || r_set.max_index() > p || !s_set.disjoint_with(r_set))
        throw index_error("check_theorem_asymmetric: invalid index sets");
    const std::size_t k = s_set.size();
    const Matrix sss = submatrix(sigma_limit, s_set, s_set);
    const Matrix g_ss = submatrix(sigma_first_order, s_set, s_set);

    AsymmetricReport rep;
    Matrix u, b, v;
    if (factors) {
        u = factors->u;
        b = factors->b;
        v = factors->v;
        if (u.rows() != k || v.rows() != k || u.cols() != v.cols() || b.rows() != u.cols() ||
            b.cols() != u.cols())
            throw dimension_error("check_theorem_asymmetric: factor shapes are inconsistent");
        if ((sss - u * b * v.transpose()).max_norm() > 1e-6 * (1.0 + sss.max_norm()))
            throw structure_error("check_theorem_asymmetric: factors do not reconstruct Sigma_SS");
        rep.rank_r = u.cols();
    } else {
        const auto s = detail::svd(sss);
        const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
        std::size_t r = 0;
        while (r < s.sigma.size() && s.sigma[r] > opt.rank_tol * smax) ++r;
        rep.rank_r = r;
        u = Matrix(k, r);
        v = Matrix(k, r);
        b = Matrix(r, r);
        for (std::size_t c = 0; c < r; ++c) {
            b(c, c) = s.sigma[c];
            for (std::size_t i = 0; i < k; ++i) {
                u(i, c) = s.u(i, c);
                v(i, c) = s.v(i, c);
            }
        }
    }

    rep.f_asy_value = detail::f_asy_core(u, v, g_ss);
    if (rep.rank_r == k) {
        rep.f_nonzero = true;
        rep.column_space_ok = true;
        rep.row_space_ok = true;
    } else {
        const double f_tol =
            detail::condition_i_threshold(g_ss, k - rep.rank_r, opt.f_tol_rel);
        rep.f_nonzero = std::abs(rep.f_asy_value) > f_tol;
        rep.column_space_ok = column_space_contains(
            sss, submatrix(sigma_limit, s_set, r_set), opt.col_tol, opt.rank_tol);
        rep.row_space_ok = column_space_contains(
            sss.transpose(), submatrix(sigma_limit, r_set, s_set).transpose(), opt.col_tol,
            opt.rank_tol);
    }
    rep.accepted = rep.f_nonzero && rep.column_space_ok && rep.row_space_ok;

    const Matrix srr = submatrix(sigma_limit, r_set, r_set);
    if (k == 0) {
        rep.limit_conditional = srr;
    } else {
        rep.limit_conditional = srr - submatrix(sigma_limit, r_set, s_set) *
                                          pseudoinverse(sss, opt.rank_tol) *
                                          submatrix(sigma_limit, s_set, r_set);
    }
    return rep;
}

/// Column family w_m = w + h/m + o(1/m) feeding the Cramer limit.
struct VectorSeries {
    Matrix limit;        // k x 1
    Matrix first_order;  // k x 1
};

/// Limit of the j-th coordinate (1-based) of A_m^{-1} w_m along the family,
/// evaluated through the leading-order coefficients of the Cramer quotient
/// det(A_m[j]) / det(A_m). Requires the denominator coefficient (condition (i))
/// to be nonzero; raises singular_error otherwise.
inline double cramer_entry_limit(const PerturbationFamily& a_family, const VectorSeries& w,
                                 std::size_t j, const CheckOptions& opt = {}) {
    const Matrix& a = a_family.sigma_limit;
    const Matrix& g = a_family.sigma_first_order;
    const std::size_t k = a.rows();
    if (!a.is_square() || g.rows() != k || !g.is_square())
        throw dimension_error("cramer_entry_limit: A and G must be square and equal-sized");
    if (w.limit.rows() != k || w.limit.cols() != 1 || w.first_order.rows() != k ||
        w.first_order.cols() != 1)
        throw dimension_error("cramer_entry_limit: w must be a k x 1 column family");
    if (j < 1 || j > k) throw index_error("cramer_entry_limit: coordinate out of range");

    const RankDecomposition decomp = detail::resolve_decomposition(a, opt);
    if (decomp.rank == k) {
        return solve(a, w.limit)(j - 1, 0);
    }
    const double denominator = det(decomp.b) * detail::f_asy_core(decomp.u, decomp.u, g);
    const double f_tol =
        detail::condition_i_threshold(g, k - decomp.rank, opt.f_tol_rel) * std::abs(det(decomp.b));
    if (std::abs(denominator) <= f_tol)
        throw singular_error(
            "cramer_entry_limit: condition (i) fails; the denominator decays faster than m^{-(k-r)}");

    Matrix a_j = a;
    Matrix g_j = g;
    for (std::size_t i = 0; i < k; ++i) {
        a_j(i, j - 1) = w.limit(i, 0);
        g_j(i, j - 1) = w.first_order(i, 0);
    }
    // factor A[j] = U~ V~^T with inner dimension r (rank may drop; zero
    // singular directions simply contribute zero columns)
    const auto s = detail::svd(a_j);
    const std::size_t r = decomp.rank;
    Matrix ut(k, r), vt(k, r);
    for (std::size_t c = 0; c < r && c < s.sigma.size(); ++c)
        for (std::size_t i = 0; i < k; ++i) {
            ut(i, c) = s.u(i, c) * s.sigma[c];
            vt(i, c) = s.v(i, c);
        }
    const double numerator = detail::f_asy_core(ut, vt, g_j);
    return numerator / denominator;
}

}  // namespace schurlim
