#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace pcgcn {

/// Row-major dense matrix of 64-bit reals. The single tensor type used by
/// every kernel and model stage; vectors are 1xN or Nx1 matrices.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows && j < cols);
        return values[i * cols + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows && j < cols);
        return values[i * cols + j];
    }

    double* row(std::size_t i) { return values.data() + i * cols; }
    const double* row(std::size_t i) const { return values.data() + i * cols; }

    double* data() { return values.data(); }
    const double* data() const { return values.data(); }

    std::size_t size() const { return values.size(); }
    bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }

    void zero() { std::fill(values.begin(), values.end(), 0.0); }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j)
            t(j, i) = a(i, j);
    return t;
}

} // namespace pcgcn
