#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "schurlim/linalg.hpp"
#include "schurlim/matrix.hpp"
#include "schurlim/random.hpp"

namespace schurlim {

namespace detail {

/// Lexicographic enumeration of t-subsets of {1..k}, 1-based.
class SubsetIterator {
public:
    SubsetIterator(int k, int t) : k_(k), current_(static_cast<std::size_t>(t)) {
        for (int i = 0; i < t; ++i) current_[static_cast<std::size_t>(i)] = i + 1;
        done_ = t > k;
    }

    [[nodiscard]] bool done() const { return done_; }
    [[nodiscard]] const std::vector<int>& subset() const { return current_; }

    void advance() {
        const int t = static_cast<int>(current_.size());
        int i = t - 1;
        while (i >= 0 && current_[static_cast<std::size_t>(i)] == k_ - (t - 1 - i)) --i;
        if (i < 0) {
            done_ = true;
            return;
        }
        ++current_[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < t; ++j)
            current_[static_cast<std::size_t>(j)] = current_[static_cast<std::size_t>(j - 1)] + 1;
    }

private:
    int k_;
    std::vector<int> current_;
    bool done_ = false;
};

/// Signed subset-sum core shared by f_asy and the theorem checker. Accepts the
/// full range 0 <= r <= k: r = k degenerates to det(U) det(V) (the empty-alpha
/// convention) and r = 0 to det(G).
inline double f_asy_core(const Matrix& u, const Matrix& v, const Matrix& g) {
    const int k = static_cast<int>(u.rows());
    const int r = static_cast<int>(u.cols());
    const int t = k - r;
    const double sign0 = ((static_cast<long>(t) * (t + 1) / 2) % 2 == 0) ? 1.0 : -1.0;
    double sum = 0.0, comp = 0.0;  // Kahan accumulation, fixed term order
    Matrix bordered(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    for (SubsetIterator it(k, t); !it.done(); it.advance()) {
        const std::vector<int>& alpha = it.subset();
        for (int c = 0; c < t; ++c) {
            const std::size_t src = static_cast<std::size_t>(alpha[static_cast<std::size_t>(c)] - 1);
            for (int i = 0; i < k; ++i)
                bordered(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) =
                    g(static_cast<std::size_t>(i), src);
        }
        for (int c = 0; c < r; ++c)
            for (int i = 0; i < k; ++i)
                bordered(static_cast<std::size_t>(i), static_cast<std::size_t>(t + c)) =
                    u(static_cast<std::size_t>(i), static_cast<std::size_t>(c));
        double det2 = 1.0;
        if (r > 0) {
            Matrix vrows(static_cast<std::size_t>(r), static_cast<std::size_t>(r));
            std::size_t ri = 0, ai = 0;
            for (int row = 1; row <= k; ++row) {
                if (ai < alpha.size() && alpha[ai] == row) {
                    ++ai;
                    continue;
                }
                for (int c = 0; c < r; ++c)
                    vrows(ri, static_cast<std::size_t>(c)) =
                        v(static_cast<std::size_t>(row - 1), static_cast<std::size_t>(c));
                ++ri;
            }
            det2 = det(vrows);
        }
        long s_alpha = 0;
        for (int a : alpha) s_alpha += a;
        const double sign = (s_alpha % 2 == 0) ? 1.0 : -1.0;
        const double term = sign * det(bordered) * det2;
        const double y = term - comp;
        const double tmp = sum + y;
        comp = (tmp - sum) - y;
        sum = tmp;
    }
    return sign0 * sum;
}

}  // namespace detail

/// f_asy(U, V, G): the signed sum over all column selections alpha of size k-r,
///   (-1)^{s([k-r])} sum_alpha (-1)^{s(alpha)} det([G_{.,alpha} | U]) det(V_{[k]\alpha,.}),
/// with ascending order preserved inside each determinant. This is the leading
/// coefficient of det(U B V^T + G/m) in the generalized determinant lemma.
inline double f_asy(const Matrix& u, const Matrix& v, const Matrix& g) {
    const std::size_t k = u.rows(), r = u.cols();
    if (v.rows() != k || v.cols() != r) throw dimension_error("f_asy: U and V shapes differ");
    if (g.rows() != k || g.cols() != k) throw dimension_error("f_asy: G must be k x k");
    if (r >= k) throw dimension_error("f_asy: requires r < k");
    if (k > 20) throw dimension_error("f_asy: k > 20 exceeds the subset enumeration ceiling");
    return detail::f_asy_core(u, v, g);
}

/// f(U, G) = f_asy(U, U, G).
inline double f(const Matrix& u, const Matrix& g) { return f_asy(u, u, g); }

/// Classical adjugate via cofactors; satisfies G Adj(G) = det(G) I.
inline Matrix adjugate(const Matrix& g) {
    if (!g.is_square()) throw dimension_error("adjugate: matrix must be square");
    const std::size_t k = g.rows();
    Matrix adj(k, k);
    if (k == 0) return adj;
    if (k == 1) {
        adj(0, 0) = 1.0;
        return adj;
    }
    Matrix minor(k - 1, k - 1);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            // (i,j) entry of the adjugate is the (j,i) cofactor
            std::size_t mr = 0;
            for (std::size_t r = 0; r < k; ++r) {
                if (r == j) continue;
                std::size_t mc = 0;
                for (std::size_t c = 0; c < k; ++c) {
                    if (c == i) continue;
                    minor(mr, mc++) = g(r, c);
                }
                ++mr;
            }
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            adj(i, j) = sign * det(minor);
        }
    }
    return adj;
}

/// Outcome of a finite-m probe of the generalized determinant lemma.
struct LeadingOrderResult {
    int order = 0;                      // k - r
    double coefficient = 0.0;           // det(B) * f_asy(U, V, G)
    double empirical_coefficient = 0.0; // recovered from det at m_probe
    double ratio_error = 0.0;           // |empirical - coefficient| / (1 + |coefficient|)
    double ratio_error_doubled = 0.0;   // same probe at 2 * m_probe
    bool decay_confirmed = false;
};

namespace detail {

inline double int_pow(double base, int e) {
    double out = 1.0;
    for (int i = 0; i < e; ++i) out *= base;
    return out;
}

inline double empirical_leading(const Matrix& u, const Matrix& v, const Matrix& b,
                                const Matrix& g, const Matrix& noise, double m) {
    const int k = static_cast<int>(u.rows());
    const int r = static_cast<int>(u.cols());
    Matrix x = u * b * v.transpose() + (1.0 / m) * g;
    if (!noise.empty()) x = x + noise;
    const double d = det(x);
    if (r == 1) {
        // exact two-term rank-1 expansion: subtract the det(G)/m^k tail
        return d * int_pow(m, k - 1) - det(g) / m;
    }
    return d * int_pow(m, k - r);
}

inline LeadingOrderResult probe_leading_order(const Matrix& u, const Matrix& v, const Matrix& b,
                                              const Matrix& g, double m_probe,
                                              const Matrix& noise1, const Matrix& noise2) {
    const std::size_t k = u.rows(), r = u.cols();
    if (v.rows() != k || v.cols() != r)
        throw dimension_error("verify_leading_order: U and V shapes differ");
    if (b.rows() != r || b.cols() != r)
        throw dimension_error("verify_leading_order: B must be r x r");
    if (g.rows() != k || g.cols() != k)
        throw dimension_error("verify_leading_order: G must be k x k");
    if (r >= k) throw dimension_error("verify_leading_order: requires r < k");
    if (m_probe < 10.0) throw error("verify_leading_order: m_probe must be at least 10");
    LeadingOrderResult res;
    res.order = static_cast<int>(k - r);
    res.coefficient = det(b) * f_asy(u, v, g);
    res.empirical_coefficient = empirical_leading(u, v, b, g, noise1, m_probe);
    const double scale = 1.0 + std::abs(res.coefficient);
    res.ratio_error = std::abs(res.empirical_coefficient - res.coefficient) / scale;
    const double emp2 = empirical_leading(u, v, b, g, noise2, 2.0 * m_probe);
    res.ratio_error_doubled = std::abs(emp2 - res.coefficient) / scale;
    // errors already at the 1/m scale carry no decay information
    const double floor = 10.0 / m_probe;
    res.decay_confirmed = res.ratio_error_doubled <= 0.6 * res.ratio_error ||
                          std::max(res.ratio_error, res.ratio_error_doubled) <= floor;
    return res;
}

}  // namespace detail

/// Probe det(U B V^T + G/m) at m_probe and 2*m_probe and compare against the
/// predicted leading coefficient det(B) f_asy(U,V,G). Rank-1 inputs use the
/// exact two-term expansion, so their ratio errors sit at roundoff level.
inline LeadingOrderResult verify_leading_order(const Matrix& u, const Matrix& v, const Matrix& b,
                                               const Matrix& g, double m_probe) {
    return detail::probe_leading_order(u, v, b, g, m_probe, Matrix(), Matrix());
}

/// Same probe with an additional noise matrix D^(m) of entry magnitude
/// noise_scale / m^{3/2} (one fixed draw rescaled per m, so the decay of the
/// noise contribution is deterministic).
inline LeadingOrderResult verify_noise_robustness(const Matrix& u, const Matrix& v,
                                                  const Matrix& b, const Matrix& g,
                                                  double noise_scale, double m_probe,
                                                  std::uint64_t seed = 0x5eed) {
    const std::size_t k = u.rows();
    Rng rng(seed);
    const Matrix base = rng.matrix_uniform(k, k, -noise_scale, noise_scale);
    const auto scaled = [&](double m) { return std::pow(m, -1.5) * base; };
    return detail::probe_leading_order(u, v, b, g, m_probe, scaled(m_probe),
                                       scaled(2.0 * m_probe));
}

}  // namespace schurlim
