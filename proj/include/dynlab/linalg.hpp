#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace dynlab {

/// Dense row-major matrix. Sized for the small blocks used by the agent and
/// environment models, not for heavy linear algebra.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    static Matrix identity(std::size_t n, double scale = 1.0) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
        return m;
    }

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    void set_zero() { std::fill(data.begin(), data.end(), 0.0); }

    bool operator==(const Matrix&) const = default;
};

/// out = m * v (out must not alias v).
inline void multiply(const Matrix& m, std::span<const double> v, std::span<double> out) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        double acc = 0.0;
        const double* row = m.data.data() + r * m.cols;
        for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * v[c];
        out[r] = acc;
    }
}

} // namespace dynlab
