#include <catch2/catch_amalgamated.hpp>

#include "schurlim/det_asymptotics.hpp"
#include "schurlim/linalg.hpp"
#include "schurlim/random.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace schurlim;

namespace {

/// Direct two-term enumeration of f_asy for k = 2, r = 1:
///   -[ (-1)^1 det([g_1 | u]) v_2 + (-1)^2 det([g_2 | u]) v_1 ].
double f_asy_k2_oracle(const Matrix& u, const Matrix& v, const Matrix& g) {
    const double d1 = g(0, 0) * u(1, 0) - g(1, 0) * u(0, 0);
    const double d2 = g(0, 1) * u(1, 0) - g(1, 1) * u(0, 0);
    return d1 * v(1, 0) - d2 * v(0, 0);
}

}  // namespace

TEST_CASE("f on the 3x3 example matches the symbolic identity") {
    const Matrix u = fixtures::u234();
    SECTION("ten random G") {
        Rng rng(3);
        for (int t = 0; t < 10; ++t) {
            const Matrix g = rng.matrix_uniform(3, 3, -5.0, 5.0);
            const double expected = g(1, 1) - g(2, 1) + g(2, 2) - g(1, 2);
            CHECK_THAT(f(u, g), Catch::Matchers::WithinAbs(expected, 1e-12));
        }
    }
    SECTION("concrete instantiation") {
        Matrix g(3, 3);
        g(1, 1) = 5.0;  // g22
        g(2, 1) = 1.0;  // g32
        g(2, 2) = 2.0;  // g33
        g(1, 2) = 3.0;  // g23
        CHECK_THAT(f(u, g), Catch::Matchers::WithinAbs(3.0, 1e-12));
    }
    SECTION("first-order block of the 5-node family gives 2") {
        CHECK_THAT(f(u, fixtures::g234()), Catch::Matchers::WithinAbs(2.0, 1e-12));
        // the value only involves the Toeplitz block, not the corner entries,
        // so it is insensitive to their sign
        Matrix flipped = fixtures::g234();
        flipped(0, 2) = 0.5;
        flipped(2, 0) = 0.5;
        CHECK_THAT(f(u, flipped), Catch::Matchers::WithinAbs(2.0, 1e-12));
    }
}

TEST_CASE("f_asy input validation") {
    const Matrix u(3, 3);
    CHECK_THROWS_AS(f_asy(u, u, Matrix(3, 3)), dimension_error);  // r = k
    CHECK_THROWS_AS(f_asy(Matrix(3, 1), Matrix(3, 2), Matrix(3, 3)), dimension_error);
    CHECK_THROWS_AS(f_asy(Matrix(3, 1), Matrix(3, 1), Matrix(2, 2)), dimension_error);
    CHECK_THROWS_AS(f_asy(Matrix(21, 1), Matrix(21, 1), Matrix(21, 21)), dimension_error);
}

TEST_CASE("f_asy vanishes termwise for zero G at corank 1") {
    Rng rng(5);
    const Matrix u = rng.matrix_uniform(4, 3, -1.0, 1.0);
    const Matrix v = rng.matrix_uniform(4, 3, -1.0, 1.0);
    CHECK(f_asy(u, v, Matrix(4, 4)) == 0.0);
}

TEST_CASE("f_asy agrees with the direct 2-term oracle at k=2, r=1") {
    Rng rng(17);
    for (int t = 0; t < 25; ++t) {
        const Matrix u = rng.matrix_uniform_int(2, 1, -3, 3);
        const Matrix v = rng.matrix_uniform_int(2, 1, -3, 3);
        const Matrix g = rng.matrix_uniform_int(2, 2, -3, 3);
        CHECK_THAT(f_asy(u, v, g),
                   Catch::Matchers::WithinAbs(f_asy_k2_oracle(u, v, g), 1e-12));
    }
}

TEST_CASE("basis change scales f by det(C)^2") {
    Rng rng(23);
    for (int t = 0; t < 50; ++t) {
        const int k = rng.uniform_int(2, 6);
        const int r = rng.uniform_int(1, k - 1);
        const Matrix u = rng.matrix_uniform(k, r, -2.0, 2.0);
        const Matrix g = rng.matrix_uniform(k, k, -2.0, 2.0);
        Matrix c = rng.matrix_uniform(r, r, -1.0, 1.0);
        for (int i = 0; i < r; ++i) c(i, i) += 2.0;
        const double lhs = f(u * c, g);
        const double rhs = det(c) * det(c) * f(u, g);
        CHECK_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-9 * (1.0 + std::abs(rhs))));
    }
}

TEST_CASE("f_asy is linear in each column of G") {
    Rng rng(29);
    for (int t = 0; t < 10; ++t) {
        const Matrix u = rng.matrix_uniform(4, 2, -1.0, 1.0);
        const Matrix v = rng.matrix_uniform(4, 2, -1.0, 1.0);
        const Matrix g1 = rng.matrix_uniform(4, 4, -1.0, 1.0);
        Matrix g2 = g1;
        Matrix g_sum = g1;
        const std::size_t col = static_cast<std::size_t>(rng.uniform_int(0, 3));
        for (std::size_t i = 0; i < 4; ++i) {
            const double extra = rng.uniform(-1.0, 1.0);
            g2(i, col) = extra;
            g_sum(i, col) = g1(i, col) + extra;
        }
        const double split = f_asy(u, v, g1) + f_asy(u, v, g2);
        // adding the two G's in the modified column only: f is affine there,
        // so f(g1 with col+extra) = f(g1) + f(g1 with col replaced by extra) - f(g1 with col zeroed)
        Matrix g_zero = g1;
        for (std::size_t i = 0; i < 4; ++i) g_zero(i, col) = 0.0;
        const double direct = f_asy(u, v, g_sum) + f_asy(u, v, g_zero);
        CHECK_THAT(direct, Catch::Matchers::WithinAbs(split, 1e-9 * (1.0 + std::abs(split))));
    }
}

TEST_CASE("adjugate pinned cases and law") {
    SECTION("2x2 closed form") {
        const Matrix g = Matrix::from_rows({{3, 7}, {2, -5}});
        const Matrix adj = adjugate(g);
        CHECK(adj(0, 0) == -5.0);
        CHECK(adj(0, 1) == -7.0);
        CHECK(adj(1, 0) == -2.0);
        CHECK(adj(1, 1) == 3.0);
    }
    SECTION("identity") {
        CHECK((adjugate(Matrix::identity(4)) - Matrix::identity(4)).max_norm() == 0.0);
    }
    SECTION("G Adj(G) = det(G) I for random matrices up to 6x6") {
        Rng rng(31);
        for (int t = 0; t < 20; ++t) {
            const int k = rng.uniform_int(2, 6);
            const Matrix g = rng.matrix_uniform(k, k, -2.0, 2.0);
            const Matrix lhs = g * adjugate(g);
            const double d = det(g);
            double scale = 1.0;
            for (int i = 0; i + 1 < k; ++i) scale *= g.max_norm();
            const Matrix expect = d * Matrix::identity(k);
            CHECK((lhs - expect).max_norm() <= 1e-8 * (1.0 + g.max_norm()) * std::max(scale, 1.0));
        }
    }
    SECTION("non-square is rejected") { CHECK_THROWS_AS(adjugate(Matrix(2, 3)), dimension_error); }
}

TEST_CASE("rank-1 f_asy equals the adjugate bilinear form") {
    Rng rng(37);
    for (int t = 0; t < 20; ++t) {
        const int k = rng.uniform_int(2, 5);
        const Matrix g = rng.matrix_uniform_int(k, k, -3, 3);
        const Matrix u = rng.matrix_uniform_int(k, 1, -3, 3);
        const Matrix v = rng.matrix_uniform_int(k, 1, -3, 3);
        const Matrix expect = v.transpose() * adjugate(g) * u;
        CHECK_THAT(f_asy(u, v, g), Catch::Matchers::WithinAbs(expect(0, 0), 1e-9));
    }
}

TEST_CASE("direct determinant equals the full Cauchy-Binet expansion") {
    Rng rng(41);
    for (int t = 0; t < 25; ++t) {
        const int k = rng.uniform_int(2, 5);
        const int r = rng.uniform_int(1, k - 1);
        const Matrix u = rng.matrix_uniform_int(k, r, -2, 2);
        const Matrix v = rng.matrix_uniform_int(k, r, -2, 2);
        const Matrix b = rng.matrix_uniform_int(r, r, -2, 2);
        const Matrix g = rng.matrix_uniform_int(k, k, -2, 2);
        const double m = 37.0;
        const double direct = det(u * b * v.transpose() + (1.0 / m) * g);
        const double expansion = oracles::full_expansion(u, v, b, g, m);
        CHECK_THAT(direct, Catch::Matchers::WithinAbs(expansion, 1e-9 * (1.0 + std::abs(direct))));
    }
}

TEST_CASE("verify_leading_order pinned cases") {
    SECTION("rank-1 expansion is exact") {
        Rng rng(43);
        const Matrix u = rng.matrix_uniform_int(4, 1, -3, 3);
        const Matrix v = rng.matrix_uniform_int(4, 1, -3, 3);
        const Matrix b = Matrix::from_rows({{2}});
        const Matrix g = rng.matrix_uniform_int(4, 4, -3, 3);
        const auto res = verify_leading_order(u, v, b, g, 1e3);
        CHECK(res.order == 3);
        CHECK(res.ratio_error <= 1e-9);
        CHECK(res.decay_confirmed);
    }
    SECTION("random k=5 r=2 instance converges at the expected rate") {
        Rng rng(47);
        Matrix u, v, b, g;
        double coef = 0.0;
        do {
            u = rng.matrix_uniform_int(5, 2, -3, 3);
            v = rng.matrix_uniform_int(5, 2, -3, 3);
            b = rng.matrix_uniform_int(2, 2, -3, 3);
            g = rng.matrix_uniform_int(5, 5, -3, 3);
            coef = det(b) * f_asy(u, v, g);
        } while (std::abs(coef) < 1.0);
        const auto res = verify_leading_order(u, v, b, g, 1e6);
        CHECK(res.ratio_error <= 1e-4);
        CHECK(res.decay_confirmed);
    }
    SECTION("zero G makes both sides vanish") {
        const Matrix u = Matrix::from_rows({{1, 0}, {0, 1}, {1, 1}});
        const Matrix b = Matrix::identity(2);
        const auto res = verify_leading_order(u, u, b, Matrix(3, 3), 1e3);
        CHECK(res.coefficient == 0.0);
        CHECK(std::abs(res.empirical_coefficient) <= 1e-12);
    }
    SECTION("validation") {
        CHECK_THROWS_AS(verify_leading_order(Matrix(3, 3), Matrix(3, 3), Matrix(3, 3), Matrix(3, 3), 1e3),
                        dimension_error);
        CHECK_THROWS_AS(verify_leading_order(Matrix(3, 1), Matrix(3, 1), Matrix(1, 1), Matrix(3, 3), 5.0),
                        error);
    }
}

TEST_CASE("verify_noise_robustness") {
    Rng rng(53);
    const Matrix u = rng.matrix_uniform_int(4, 1, -3, 3);
    const Matrix v = rng.matrix_uniform_int(4, 1, -3, 3);
    const Matrix b = Matrix::from_rows({{1}});
    const Matrix g = rng.matrix_uniform_int(4, 4, -3, 3);
    SECTION("zero noise reduces to the noiseless probe") {
        const auto noiseless = verify_leading_order(u, v, b, g, 1e4);
        const auto noisy = verify_noise_robustness(u, v, b, g, 0.0, 1e4);
        CHECK(noisy.empirical_coefficient == noiseless.empirical_coefficient);
        CHECK(noisy.ratio_error == noiseless.ratio_error);
    }
    SECTION("unit noise at m=1e6 stays within 1e-2") {
        const auto res = verify_noise_robustness(u, v, b, g, 1.0, 1e6);
        CHECK(res.ratio_error <= 1e-2);
    }
    SECTION("noise contribution decays by at least a factor 2 from m to 4m") {
        // same noise seed at both probes: contribution scales like m^{-1/2}
        const auto at_m = verify_noise_robustness(u, v, b, g, 1.0, 1e6, 99);
        const auto at_4m = verify_noise_robustness(u, v, b, g, 1.0, 4e6, 99);
        const auto clean_m = verify_leading_order(u, v, b, g, 1e6);
        const auto clean_4m = verify_leading_order(u, v, b, g, 4e6);
        const double noise_m =
            std::abs(at_m.empirical_coefficient - clean_m.empirical_coefficient);
        const double noise_4m =
            std::abs(at_4m.empirical_coefficient - clean_4m.empirical_coefficient);
        REQUIRE(noise_m > 0.0);
        CHECK(noise_4m <= noise_m / 2.0 * 1.05);  // 5% slack on the exact halving
    }
}
