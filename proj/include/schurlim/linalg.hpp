#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "schurlim/matrix.hpp"

namespace schurlim {

namespace detail {

/// LU factorization with partial pivoting, kept in-place. `sign` carries the
/// permutation parity; `singular` is set when a pivot column vanishes.
struct Lu {
    Matrix lu;
    std::vector<std::size_t> perm;
    int sign = 1;
    bool singular = false;
};

inline Lu lu_factor(Matrix a) {
    if (!a.is_square()) throw dimension_error("lu_factor: matrix must be square");
    const std::size_t n = a.rows();
    Lu out{std::move(a), {}, 1, false};
    out.perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.perm[i] = i;
    Matrix& m = out.lu;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        double best = std::abs(m(c, c));
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(m(r, c)) > best) {
                best = std::abs(m(r, c));
                piv = r;
            }
        }
        if (best == 0.0) {
            out.singular = true;
            continue;
        }
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
            std::swap(out.perm[c], out.perm[piv]);
            out.sign = -out.sign;
        }
        const double d = m(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m(r, c) / d;
            m(r, c) = f;
            for (std::size_t j = c + 1; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return out;
}

inline Matrix lu_solve(const Lu& lu, const Matrix& rhs) {
    const std::size_t n = lu.lu.rows();
    if (rhs.rows() != n) throw dimension_error("lu_solve: rhs row count mismatch");
    if (lu.singular) throw singular_error("lu_solve: matrix is singular");
    Matrix x(n, rhs.cols());
    for (std::size_t col = 0; col < rhs.cols(); ++col) {
        for (std::size_t i = 0; i < n; ++i) x(i, col) = rhs(lu.perm[i], col);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x(i, col) -= lu.lu(i, j) * x(j, col);
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) x(i, col) -= lu.lu(i, j) * x(j, col);
            x(i, col) /= lu.lu(i, i);
        }
    }
    return x;
}

}  // namespace detail

/// Determinant via pivoted Gaussian elimination. det of the 0x0 matrix is 1.
inline double det(const Matrix& a) {
    if (!a.is_square()) throw dimension_error("det: matrix must be square");
    const std::size_t n = a.rows();
    if (n == 0) return 1.0;
    if (n == 1) return a(0, 0);
    if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    auto lu = detail::lu_factor(a);
    if (lu.singular) return 0.0;
    double d = static_cast<double>(lu.sign);
    for (std::size_t i = 0; i < n; ++i) d *= lu.lu(i, i);
    return d;
}

/// Solve a x = b for square a; throws singular_error when a has no inverse.
inline Matrix solve(const Matrix& a, const Matrix& b) {
    auto lu = detail::lu_factor(a);
    return detail::lu_solve(lu, b);
}

inline Matrix inverse(const Matrix& a) {
    return solve(a, Matrix::identity(a.rows()));
}

/// Eigenvalues and orthonormal eigenvectors of a symmetric matrix via cyclic
/// Jacobi rotations. Values are sorted by decreasing |lambda| (ties broken by
/// value) and the vectors carry a deterministic sign convention.
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;  // columns are eigenvectors, same order as values
};

inline SymmetricEigen symmetric_eigen(const Matrix& a, double sym_tol = 1e-9) {
    if (!a.is_square()) throw dimension_error("symmetric_eigen: matrix must be square");
    if (!is_symmetric(a, sym_tol))
        throw symmetry_error("symmetric_eigen: matrix is not symmetric to tolerance");
    const std::size_t n = a.rows();
    Matrix m = a;
    // symmetrize exactly so the iteration sees a true symmetric matrix
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = m(j, i) = v;
        }
    Matrix v = Matrix::identity(n);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (std::sqrt(off) <= eps * (1.0 + m.max_norm()) * static_cast<double>(n)) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) <= eps * (std::abs(m(p, p)) + std::abs(m(q, q)))) {
                    continue;
                }
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double mip = m(i, p), miq = m(i, q);
                    m(i, p) = c * mip - s * miq;
                    m(i, q) = s * mip + c * miq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double mpj = m(p, j), mqj = m(q, j);
                    m(p, j) = c * mpj - s * mqj;
                    m(q, j) = s * mpj + c * mqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    SymmetricEigen out;
    out.values.resize(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = m(i, i);
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const double ax = std::abs(m(x, x)), ay = std::abs(m(y, y));
        if (ax != ay) return ax > ay;
        return m(x, x) > m(y, y);
    });
    SymmetricEigen sorted;
    sorted.values.resize(n);
    sorted.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        sorted.values[k] = m(src, src);
        std::size_t imax = 0;
        double vmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(v(i, src)) > vmax) {
                vmax = std::abs(v(i, src));
                imax = i;
            }
        }
        const double flip = (vmax > 0.0 && v(imax, src) < 0.0) ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, k) = flip * v(i, src);
    }
    return sorted;
}

namespace detail {

/// Thin SVD via one-sided Jacobi; adequate and accurate at desk scale.
struct Svd {
    Matrix u;                     // rows(a) x min-dim, orthonormal columns (zero where sigma=0)
    std::vector<double> sigma;    // descending
    Matrix v;                     // cols(a) x min-dim
};

inline Svd svd(const Matrix& a) {
    const bool flip = a.rows() < a.cols();
    Matrix w = flip ? a.transpose() : a;
    const std::size_t m = w.rows(), n = w.cols();
    Matrix v = Matrix::identity(n);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += w(i, p) * w(i, p);
                    beta += w(i, q) * w(i, q);
                    gamma += w(i, p) * w(i, q);
                }
                if (std::abs(gamma) <= 1e2 * eps * std::sqrt(alpha * beta) || gamma == 0.0)
                    continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double wip = w(i, p), wiq = w(i, q);
                    w(i, p) = c * wip - s * wiq;
                    w(i, q) = s * wip + c * wiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
        if (!rotated) break;
    }
    std::vector<double> sig(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
        sig[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < n; ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });
    Svd out;
    out.sigma.resize(n);
    out.u = Matrix(m, n);
    out.v = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        out.sigma[k] = sig[j];
        if (sig[j] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) out.u(i, k) = w(i, j) / sig[j];
        }
        for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
    }
    if (flip) {
        std::swap(out.u, out.v);
    }
    return out;
}

}  // namespace detail

/// Moore-Penrose pseudoinverse. Singular values below rel_tol * sigma_max are
/// treated as zero; the zero matrix maps to its transposed-shape zero matrix.
inline Matrix pseudoinverse(const Matrix& a, double rel_tol = 1e-12) {
    if (a.empty()) return a.transpose();
    auto s = detail::svd(a);
    const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
    const double cutoff = rel_tol * smax;
    Matrix out(a.cols(), a.rows());
    for (std::size_t k = 0; k < s.sigma.size(); ++k) {
        if (s.sigma[k] <= cutoff || s.sigma[k] == 0.0) continue;
        const double inv = 1.0 / s.sigma[k];
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double vik = s.v(i, k) * inv;
            if (vik == 0.0) continue;
            for (std::size_t j = 0; j < a.rows(); ++j) out(i, j) += vik * s.u(j, k);
        }
    }
    return out;
}

/// Symmetric rank decomposition A = U B U^T with U of full column rank r and
/// B the diagonal of retained eigenvalues (invertible; indefinite allowed).
struct RankDecomposition {
    Matrix u;  // k x r, orthonormal columns from the eigendecomposition
    Matrix b;  // r x r
    std::size_t rank = 0;
};

/// Eigendecomposition-based rank decomposition; eigenvalues with
/// |lambda| <= rank_tol * max|lambda| are discarded. Rank zero yields empty
/// factors (k x 0 and 0 x 0).
inline RankDecomposition symmetric_rank_decomposition(const Matrix& a, double rank_tol = 1e-9,
                                                      double sym_tol = 1e-9) {
    auto eig = symmetric_eigen(a, sym_tol);
    const std::size_t k = a.rows();
    double lmax = 0.0;
    for (double v : eig.values) lmax = std::max(lmax, std::abs(v));
    std::size_t r = 0;
    while (r < k && std::abs(eig.values[r]) > rank_tol * lmax) ++r;
    RankDecomposition out;
    out.rank = r;
    out.u = Matrix(k, r);
    out.b = Matrix(r, r);
    for (std::size_t c = 0; c < r; ++c) {
        out.b(c, c) = eig.values[c];
        for (std::size_t i = 0; i < k; ++i) out.u(i, c) = eig.vectors(i, c);
    }
    return out;
}

/// Pseudoinverse of A = U B U^T given the rank factors: U (U^T U)^-1 B^-1 (U^T U)^-1 U^T.
/// Exact for any full-column-rank U and invertible B; keeps the rank decision
/// consistent with the decomposition that produced the factors.
inline Matrix pseudoinverse_from_decomposition(const RankDecomposition& d) {
    const std::size_t k = d.u.rows();
    if (d.rank == 0) return Matrix(k, k);
    const Matrix ut = d.u.transpose();
    const Matrix gram_inv = inverse(ut * d.u);
    return d.u * gram_inv * inverse(d.b) * gram_inv * ut;
}

/// Conditional covariance of coordinates R given S per the Schur complement
/// Sigma_RR - Sigma_RS (Sigma_SS)^+ Sigma_SR. With use_pseudoinverse unset the
/// true inverse is used and a singular Sigma_SS raises singular_error.
inline Matrix conditional_covariance(const Matrix& sigma, const IndexSet& s_set,
                                     const IndexSet& r_set, bool use_pseudoinverse = true,
                                     double pinv_tol = 1e-12) {
    if (!sigma.is_square()) throw dimension_error("conditional_covariance: Sigma must be square");
    const int p = static_cast<int>(sigma.rows());
    if (s_set.max_index() > p || r_set.max_index() > p)
        throw index_error("conditional_covariance: index out of range");
    if (!s_set.disjoint_with(r_set))
        throw index_error("conditional_covariance: S and R must be disjoint");
    const Matrix srr = submatrix(sigma, r_set, r_set);
    if (s_set.empty()) return srr;
    const Matrix sss = submatrix(sigma, s_set, s_set);
    const Matrix srs = submatrix(sigma, r_set, s_set);
    const Matrix ssr = submatrix(sigma, s_set, r_set);
    if (use_pseudoinverse) {
        return srr - srs * pseudoinverse(sss, pinv_tol) * ssr;
    }
    auto lu = detail::lu_factor(sss);
    if (lu.singular)
        throw singular_error("conditional_covariance: Sigma_SS is singular; use the pseudoinverse mode");
    return srr - srs * detail::lu_solve(lu, ssr);
}

/// True iff im(bcols) is contained in im(a):
/// ||(I - A A^+) B||_max <= tol * (1 + ||B||_max).
inline bool column_space_contains(const Matrix& a, const Matrix& bcols, double tol = 1e-8,
                                  double rank_tol = 1e-9) {
    if (a.rows() != bcols.rows())
        throw dimension_error("column_space_contains: row count mismatch");
    if (bcols.empty()) return true;
    const Matrix proj = a * pseudoinverse(a, rank_tol);
    const Matrix resid = bcols - proj * bcols;
    return resid.max_norm() <= tol * (1.0 + bcols.max_norm());
}

namespace detail {

inline void balance(Matrix& a) {
    const std::size_t n = a.rows();
    const double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0, s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

inline void hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        // Householder vector annihilating a(k+1..n-1, k-1)
        double scale = 0.0;
        for (std::size_t i = k; i < n; ++i) scale += std::abs(a(i, k - 1));
        if (scale == 0.0) continue;
        std::vector<double> v(n, 0.0);
        double norm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            v[i] = a(i, k - 1) / scale;
            norm2 += v[i] * v[i];
        }
        double alpha = std::sqrt(norm2);
        if (v[k] > 0) alpha = -alpha;
        v[k] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0) continue;
        // A <- (I - 2 v v^T / v^T v) A (I - 2 v v^T / v^T v)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += v[i] * a(i, j);
            s = 2.0 * s / vnorm2;
            for (std::size_t i = k; i < n; ++i) a(i, j) -= s * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k; j < n; ++j) s += a(i, j) * v[j];
            s = 2.0 * s / vnorm2;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= s * v[j];
        }
        a(k, k - 1) = scale * alpha;
        for (std::size_t i = k + 1; i < n; ++i) a(i, k - 1) = 0.0;
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
inline std::vector<std::complex<double>> hqr(Matrix& a) {
    const std::size_t size = a.rows();
    std::vector<std::complex<double>> out;
    if (size == 0) return out;
    int n = static_cast<int>(size) - 1;
    auto h = [&](int i, int j) -> double& {
        return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    };
    double anorm = 0.0;
    for (int i = 0; i <= n; ++i)
        for (int j = std::max(i - 1, 0); j <= n; ++j) anorm += std::abs(h(i, j));
    const double eps = std::numeric_limits<double>::epsilon();
    double t = 0.0;
    while (n >= 0) {
        int its = 0;
        int l;
        do {
            for (l = n; l >= 1; --l) {
                double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(h(l, l - 1)) <= eps * s) {
                    h(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = h(n, n);
            if (l == n) {
                out.emplace_back(x + t, 0.0);
                --n;
            } else {
                double y = h(n - 1, n - 1);
                double w = h(n, n - 1) * h(n - 1, n);
                if (l == n - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + (p >= 0 ? z : -z);
                        out.emplace_back(x + z, 0.0);
                        out.emplace_back(z != 0.0 ? x - w / z : x + z, 0.0);
                    } else {
                        out.emplace_back(x + p, z);
                        out.emplace_back(x + p, -z);
                    }
                    n -= 2;
                } else {
                    if (its == 60) throw error("eigenvalues: QR iteration did not converge");
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0, s, u, v;
                    if (its % 10 == 0 && its > 0) {
                        // exceptional shift
                        t += x;
                        for (int i = 0; i <= n; ++i) h(i, i) -= x;
                        s = std::abs(h(n, n - 1)) + std::abs(h(n - 1, n - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    for (m = n - 2; m >= l; --m) {
                        z = h(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
                        q = h(m + 1, m + 1) - z - r - s;
                        r = h(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        u = std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r));
                        v = std::abs(p) *
                            (std::abs(h(m - 1, m - 1)) + std::abs(z) + std::abs(h(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= n; ++i) {
                        h(i, i - 2) = 0.0;
                        if (i > m + 2) h(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= n - 1; ++k) {
                        if (k != m) {
                            p = h(k, k - 1);
                            q = h(k + 1, k - 1);
                            r = (k != n - 1) ? h(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = std::sqrt(p * p + q * q + r * r);
                        if (p < 0) s = -s;
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) h(k, k - 1) = -h(k, k - 1);
                        } else {
                            h(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= n; ++j) {
                            p = h(k, j) + q * h(k + 1, j);
                            if (k != n - 1) {
                                p += r * h(k + 2, j);
                                h(k + 2, j) -= p * z;
                            }
                            h(k + 1, j) -= p * y;
                            h(k, j) -= p * x;
                        }
                        const int mmin = (n < k + 3) ? n : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            p = x * h(i, k) + y * h(i, k + 1);
                            if (k != n - 1) {
                                p += z * h(i, k + 2);
                                h(i, k + 2) -= p * r;
                            }
                            h(i, k + 1) -= p * q;
                            h(i, k) -= p;
                        }
                    }
                }
            }
        } while (l < n - 1);
    }
    return out;
}

}  // namespace detail

/// Eigenvalues of a general real square matrix (balanced Hessenberg + shifted
/// QR). Sorted by descending real part, then descending imaginary part.
inline std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
    if (!a.is_square()) throw dimension_error("eigenvalues: matrix must be square");
    Matrix m = a;
    detail::balance(m);
    detail::hessenberg(m);
    auto vals = detail::hqr(m);
    std::sort(vals.begin(), vals.end(), [](const auto& x, const auto& y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return vals;
}

}  // namespace schurlim
