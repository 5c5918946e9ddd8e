#include "pcgcn/kernels.hpp"

#include <cmath>

// Reference kernels. Plain loops, no tricks. The AVX2 variants mirror these
// loop orders exactly; any change here must be reflected there or the
// bitwise-equivalence tests will fail.

namespace pcgcn::kernels {
namespace {

// Row blocking for the transposed product keeps the output panel hot while
// still walking i in ascending order per output element.
constexpr std::size_t kAtBlock = 64;

void matmul_scalar(double* c, const double* a, const double* b,
                   std::size_t n, std::size_t k, std::size_t m, bool accumulate) {
    for (std::size_t i = 0; i < n; ++i) {
        double* crow = c + i * m;
        if (!accumulate) {
            for (std::size_t j = 0; j < m; ++j) crow[j] = 0.0;
        }
        const double* arow = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b + p * m;
            for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_at_b_scalar(double* c, const double* a, const double* b,
                        std::size_t n, std::size_t k, std::size_t m) {
    for (std::size_t ib = 0; ib < n; ib += kAtBlock) {
        const std::size_t ie = ib + kAtBlock < n ? ib + kAtBlock : n;
        for (std::size_t p = 0; p < k; ++p) {
            double* crow = c + p * m;
            for (std::size_t i = ib; i < ie; ++i) {
                const double av = a[i * k + p];
                const double* brow = b + i * m;
                for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
            }
        }
    }
}

void spmm_scalar(double* c, const std::int32_t* row_offsets, const std::int32_t* cols,
                 const double* vals, std::size_t n, const double* b, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        double* crow = c + i * m;
        for (std::size_t j = 0; j < m; ++j) crow[j] = 0.0;
        for (std::int32_t e = row_offsets[i]; e < row_offsets[i + 1]; ++e) {
            const double v = vals[e];
            const double* brow = b + static_cast<std::size_t>(cols[e]) * m;
            for (std::size_t j = 0; j < m; ++j) crow[j] += v * brow[j];
        }
    }
}

void axpy_scalar(double* y, const double* x, double alpha, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) y[i] += alpha * x[i];
}

void hadamard_scalar(double* y, const double* a, const double* b, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) y[i] = a[i] * b[i];
}

void relu_fwd_scalar(double* y, const double* x, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_bwd_scalar(double* dx, const double* dy, const double* x, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        if (x[i] > 0.0) dx[i] += dy[i];
    }
}

void scale_scalar(double* y, const double* x, double s, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) y[i] = s * x[i];
}

void add_bias_scalar(double* y, const double* bias, std::size_t n, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        double* row = y + i * m;
        for (std::size_t j = 0; j < m; ++j) row[j] += bias[j];
    }
}

void colsum_scalar(double* out, const double* a, std::size_t n, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a + i * m;
        for (std::size_t j = 0; j < m; ++j) out[j] += row[j];
    }
}

void adam_step_scalar(double* value, double* m, double* v, const double* g,
                      std::size_t len, double lr, double b1, double b2,
                      double eps, double bc1, double bc2) {
    for (std::size_t i = 0; i < len; ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * (g[i] * g[i]);
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        value[i] -= lr * (mhat / (std::sqrt(vhat) + eps));
    }
}

const KernelTable kScalarTable = {
    "scalar",
    matmul_scalar,
    matmul_at_b_scalar,
    spmm_scalar,
    axpy_scalar,
    hadamard_scalar,
    relu_fwd_scalar,
    relu_bwd_scalar,
    scale_scalar,
    add_bias_scalar,
    colsum_scalar,
    adam_step_scalar,
};

} // namespace

const KernelTable& scalar_table() { return kScalarTable; }

} // namespace pcgcn::kernels
