#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace schurlim {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class dimension_error : public error {
public:
    using error::error;
};

class index_error : public error {
public:
    using error::error;
};

class symmetry_error : public error {
public:
    using error::error;
};

class singular_error : public error {
public:
    using error::error;
};

class stability_error : public error {
public:
    using error::error;
};

class structure_error : public error {
public:
    using error::error;
};

class extraction_error : public error {
public:
    using error::error;
};

class parse_error : public error {
public:
    using error::error;
};

/// Dense real matrix in row-major order. The universal carrier for
/// covariance matrices, drift matrices, rank factors and Toeplitz blocks.
/// Entries must stay finite; constructors taking external data enforce it.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_) {
            throw dimension_error("matrix data size does not match rows*cols");
        }
        require_finite();
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    /// Row-literal construction, handy in tests and fixtures.
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.begin()->size();
        Matrix m(r, c);
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != c) throw dimension_error("ragged row in matrix literal");
            std::size_t j = 0;
            for (double v : row) m(i, j++) = v;
            ++i;
        }
        m.require_finite();
        return m;
    }

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] bool empty() const { return rows_ == 0 || cols_ == 0; }
    [[nodiscard]] bool is_square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] const std::vector<double>& data() const { return data_; }

    [[nodiscard]] Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    /// Entrywise max-norm; zero for empty matrices.
    [[nodiscard]] double max_norm() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    void require_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) throw error("matrix contains a non-finite entry");
        }
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw dimension_error("matrix addition: shape mismatch");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw dimension_error("matrix subtraction: shape mismatch");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw dimension_error("matrix product: inner dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

inline Matrix operator*(double s, const Matrix& a) {
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
    return c;
}

inline Matrix operator*(const Matrix& a, double s) { return s * a; }

inline Matrix operator-(const Matrix& a) { return -1.0 * a; }

inline bool is_symmetric(const Matrix& a, double tol = 1e-9) {
    if (!a.is_square()) return false;
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            d = std::max(d, std::abs(a(i, j) - a(j, i)));
    return d <= tol * (1.0 + a.max_norm());
}

/// Strictly increasing set of 1-based indices. Encodes the conditioning and
/// target sets as well as the column selections of the subset sums; submatrix
/// extraction through an IndexSet preserves the ascending order.
class IndexSet {
public:
    IndexSet() = default;

    explicit IndexSet(std::vector<int> indices) : indices_(std::move(indices)) {
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            if (indices_[i] < 1) throw index_error("IndexSet entries are 1-based and positive");
            if (i > 0 && indices_[i] <= indices_[i - 1])
                throw index_error("IndexSet must be strictly increasing");
        }
    }

    IndexSet(std::initializer_list<int> indices) : IndexSet(std::vector<int>(indices)) {}

    /// {1, 2, ..., p}
    static IndexSet full(int p) {
        std::vector<int> v(static_cast<std::size_t>(std::max(p, 0)));
        for (int i = 0; i < p; ++i) v[static_cast<std::size_t>(i)] = i + 1;
        return IndexSet(std::move(v));
    }

    [[nodiscard]] std::size_t size() const { return indices_.size(); }
    [[nodiscard]] bool empty() const { return indices_.empty(); }
    [[nodiscard]] int operator[](std::size_t pos) const { return indices_[pos]; }
    [[nodiscard]] auto begin() const { return indices_.begin(); }
    [[nodiscard]] auto end() const { return indices_.end(); }
    [[nodiscard]] const std::vector<int>& values() const { return indices_; }

    /// s(alpha) = sum of the members.
    [[nodiscard]] long index_sum() const {
        long s = 0;
        for (int i : indices_) s += i;
        return s;
    }

    [[nodiscard]] bool contains(int i) const {
        return std::binary_search(indices_.begin(), indices_.end(), i);
    }

    [[nodiscard]] int max_index() const { return indices_.empty() ? 0 : indices_.back(); }

    [[nodiscard]] IndexSet complement(int p) const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(p) - indices_.size());
        for (int i = 1; i <= p; ++i)
            if (!contains(i)) out.push_back(i);
        return IndexSet(std::move(out));
    }

    [[nodiscard]] bool disjoint_with(const IndexSet& other) const {
        for (int i : other.indices_)
            if (contains(i)) return false;
        return true;
    }

private:
    std::vector<int> indices_;
};

/// Extract a submatrix by 1-based row and column index sets, preserving the
/// ascending order of the selections.
inline Matrix submatrix(const Matrix& a, const IndexSet& rows, const IndexSet& cols) {
    if (rows.max_index() > static_cast<int>(a.rows()) ||
        cols.max_index() > static_cast<int>(a.cols())) {
        throw index_error("submatrix: index out of range");
    }
    Matrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(i, j) = a(static_cast<std::size_t>(rows[i] - 1),
                          static_cast<std::size_t>(cols[j] - 1));
    return out;
}

}  // namespace schurlim
