#pragma once

#include <cstdint>
#include <random>

#include "schurlim/matrix.hpp"

namespace schurlim {

/// Seeded generator with explicit value mappings so streams are identical
/// across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], inclusive, via rejection.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t u;
        do {
            u = gen_();
        } while (u >= limit);
        return lo + static_cast<int>(u % span);
    }

    Matrix matrix_uniform(std::size_t rows, std::size_t cols, double lo, double hi) {
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
        return m;
    }

    Matrix matrix_uniform_int(std::size_t rows, std::size_t cols, int lo, int hi) {
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                m(i, j) = static_cast<double>(uniform_int(lo, hi));
        return m;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace schurlim
