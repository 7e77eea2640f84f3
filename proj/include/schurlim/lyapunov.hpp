#pragma once

#include <cmath>
#include <cstddef>

#include "schurlim/linalg.hpp"
#include "schurlim/matrix.hpp"
#include "schurlim/random.hpp"

namespace schurlim {

struct StabilityResult {
    bool stable = false;
    double spectral_abscissa = 0.0;  // max real part of the spectrum
};

/// A matrix is accepted as stable when every eigenvalue real part is below
/// -stab_tol.
inline StabilityResult is_stable(const Matrix& m, double stab_tol = 1e-9) {
    if (!m.is_square()) throw dimension_error("is_stable: matrix must be square");
    StabilityResult out;
    if (m.rows() == 0) {
        out.stable = true;
        out.spectral_abscissa = -std::numeric_limits<double>::infinity();
        return out;
    }
    const auto vals = eigenvalues(m);
    out.spectral_abscissa = vals.front().real();  // sorted by descending real part
    out.stable = out.spectral_abscissa < -stab_tol;
    return out;
}

/// Residual of the continuous Lyapunov equation: ||M S + S M^T + 2I||_max.
inline double lyapunov_residual(const Matrix& m, const Matrix& sigma) {
    const Matrix ms = m * sigma;
    return (ms + ms.transpose() + 2.0 * Matrix::identity(m.rows())).max_norm();
}

/// Solve M Sigma + Sigma M^T + 2 I = 0 for stable M through the dense p^2 x p^2
/// Kronecker-sum system (I (x) M + M (x) I) vec(Sigma) = -2 vec(I). The output
/// is symmetrized; one step of iterative refinement keeps residuals tight for
/// strongly scaled inputs.
inline Matrix solve_lyapunov(const Matrix& m, double stab_tol = 1e-9) {
    if (!m.is_square()) throw dimension_error("solve_lyapunov: matrix must be square");
    const auto stab = is_stable(m, stab_tol);
    if (!stab.stable)
        throw stability_error("solve_lyapunov: matrix is not stable (spectral abscissa " +
                              std::to_string(stab.spectral_abscissa) + ")");
    const std::size_t p = m.rows();
    const std::size_t n = p * p;
    // column-major vec convention: vec(M S) = (I (x) M) vec(S), vec(S M^T) = (M (x) I) vec(S)
    Matrix k(n, n);
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b) {
            const double mab = m(a, b);
            if (mab == 0.0) continue;
            for (std::size_t c = 0; c < p; ++c) {
                k(c * p + a, c * p + b) += mab;  // I (x) M
                k(a * p + c, b * p + c) += mab;  // M (x) I
            }
        }
    Matrix rhs(n, 1);
    for (std::size_t i = 0; i < p; ++i) rhs(i * p + i, 0) = -2.0;
    auto lu = detail::lu_factor(k);
    if (lu.singular) throw singular_error("solve_lyapunov: Kronecker system is singular");
    Matrix x = detail::lu_solve(lu, rhs);
    // one refinement pass
    Matrix resid(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        double s = -rhs(i, 0);
        for (std::size_t j = 0; j < n; ++j) s += k(i, j) * x(j, 0);
        resid(i, 0) = s;
    }
    const Matrix corr = detail::lu_solve(lu, resid);
    for (std::size_t i = 0; i < n; ++i) x(i, 0) -= corr(i, 0);
    Matrix sigma(p, p);
    for (std::size_t c = 0; c < p; ++c)
        for (std::size_t r = 0; r < p; ++r) sigma(r, c) = x(c * p + r, 0);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            const double v = 0.5 * (sigma(i, j) + sigma(j, i));
            sigma(i, j) = sigma(j, i) = v;
        }
    return sigma;
}

/// Shift-by-norm construction A - (||A|| + 1) I; stable by the Gershgorin
/// bound. Used by the randomized test suites and the CLI.
inline Matrix random_stable_matrix(std::size_t p, Rng& rng, double entry_scale = 1.0) {
    Matrix a = rng.matrix_uniform(p, p, -entry_scale, entry_scale);
    double norm = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < p; ++j) row += std::abs(a(i, j));
        norm = std::max(norm, row);
    }
    for (std::size_t i = 0; i < p; ++i) a(i, i) -= norm + 1.0;
    return a;
}

}  // namespace schurlim
