#include "pcgcn/kernels.hpp"

#include <immintrin.h>

#include <cmath>

// AVX2 kernels. Vector lanes always span independent output elements (the j
// dimension or flat element index), never a reduction, so results are
// bitwise identical to the scalar reference. Multiplies and adds are issued
// as separate intrinsics: no FMA, matching -ffp-contract=off scalar code.

#define PCGCN_AVX2 __attribute__((target("avx2")))

namespace pcgcn::kernels {
namespace {

constexpr std::size_t kAtBlock = 64;

// crow[j] += av * brow[j]
PCGCN_AVX2 inline void axpy_row(double* crow, const double* brow, double av, std::size_t m) {
    const __m256d avv = _mm256_set1_pd(av);
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        const __m256d prod = _mm256_mul_pd(avv, _mm256_loadu_pd(brow + j));
        _mm256_storeu_pd(crow + j, _mm256_add_pd(_mm256_loadu_pd(crow + j), prod));
    }
    for (; j < m; ++j) crow[j] += av * brow[j];
}

PCGCN_AVX2 void matmul_avx2(double* c, const double* a, const double* b,
                            std::size_t n, std::size_t k, std::size_t m, bool accumulate) {
    for (std::size_t i = 0; i < n; ++i) {
        double* crow = c + i * m;
        if (!accumulate) {
            for (std::size_t j = 0; j < m; ++j) crow[j] = 0.0;
        }
        const double* arow = a + i * k;
        for (std::size_t p = 0; p < k; ++p) axpy_row(crow, b + p * m, arow[p], m);
    }
}

PCGCN_AVX2 void matmul_at_b_avx2(double* c, const double* a, const double* b,
                                 std::size_t n, std::size_t k, std::size_t m) {
    for (std::size_t ib = 0; ib < n; ib += kAtBlock) {
        const std::size_t ie = ib + kAtBlock < n ? ib + kAtBlock : n;
        for (std::size_t p = 0; p < k; ++p) {
            double* crow = c + p * m;
            for (std::size_t i = ib; i < ie; ++i) axpy_row(crow, b + i * m, a[i * k + p], m);
        }
    }
}

PCGCN_AVX2 void spmm_avx2(double* c, const std::int32_t* row_offsets, const std::int32_t* cols,
                          const double* vals, std::size_t n, const double* b, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        double* crow = c + i * m;
        for (std::size_t j = 0; j < m; ++j) crow[j] = 0.0;
        for (std::int32_t e = row_offsets[i]; e < row_offsets[i + 1]; ++e) {
            axpy_row(crow, b + static_cast<std::size_t>(cols[e]) * m, vals[e], m);
        }
    }
}

PCGCN_AVX2 void axpy_avx2(double* y, const double* x, double alpha, std::size_t len) {
    axpy_row(y, x, alpha, len);
}

PCGCN_AVX2 void hadamard_avx2(double* y, const double* a, const double* b, std::size_t len) {
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < len; ++i) y[i] = a[i] * b[i];
}

PCGCN_AVX2 void relu_fwd_avx2(double* y, const double* x, std::size_t len) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d mask = _mm256_cmp_pd(xv, zero, _CMP_GT_OQ);
        _mm256_storeu_pd(y + i, _mm256_and_pd(xv, mask));
    }
    for (; i < len; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

PCGCN_AVX2 void relu_bwd_avx2(double* dx, const double* dy, const double* x, std::size_t len) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d mask = _mm256_cmp_pd(xv, zero, _CMP_GT_OQ);
        const __m256d cur = _mm256_loadu_pd(dx + i);
        const __m256d sum = _mm256_add_pd(cur, _mm256_loadu_pd(dy + i));
        // blend, not mask-and-add: leaves dx lanes untouched where x <= 0,
        // exactly like the scalar branch (dx += 0.0 would flip a -0.0).
        _mm256_storeu_pd(dx + i, _mm256_blendv_pd(cur, sum, mask));
    }
    for (; i < len; ++i) {
        if (x[i] > 0.0) dx[i] += dy[i];
    }
}

PCGCN_AVX2 void scale_avx2(double* y, const double* x, double s, std::size_t len) {
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_mul_pd(sv, _mm256_loadu_pd(x + i)));
    }
    for (; i < len; ++i) y[i] = s * x[i];
}

PCGCN_AVX2 void add_bias_avx2(double* y, const double* bias, std::size_t n, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        double* row = y + i * m;
        std::size_t j = 0;
        for (; j + 4 <= m; j += 4) {
            _mm256_storeu_pd(row + j, _mm256_add_pd(_mm256_loadu_pd(row + j),
                                                    _mm256_loadu_pd(bias + j)));
        }
        for (; j < m; ++j) row[j] += bias[j];
    }
}

PCGCN_AVX2 void colsum_avx2(double* out, const double* a, std::size_t n, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a + i * m;
        std::size_t j = 0;
        for (; j + 4 <= m; j += 4) {
            _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j),
                                                    _mm256_loadu_pd(row + j)));
        }
        for (; j < m; ++j) out[j] += row[j];
    }
}

PCGCN_AVX2 void adam_step_avx2(double* value, double* m, double* v, const double* g,
                               std::size_t len, double lr, double b1, double b2,
                               double eps, double bc1, double bc2) {
    const __m256d b1v = _mm256_set1_pd(b1);
    const __m256d b2v = _mm256_set1_pd(b2);
    const __m256d c1v = _mm256_set1_pd(1.0 - b1);
    const __m256d c2v = _mm256_set1_pd(1.0 - b2);
    const __m256d bc1v = _mm256_set1_pd(bc1);
    const __m256d bc2v = _mm256_set1_pd(bc2);
    const __m256d lrv = _mm256_set1_pd(lr);
    const __m256d epsv = _mm256_set1_pd(eps);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        const __m256d gv = _mm256_loadu_pd(g + i);
        const __m256d mv = _mm256_add_pd(_mm256_mul_pd(b1v, _mm256_loadu_pd(m + i)),
                                         _mm256_mul_pd(c1v, gv));
        const __m256d vv = _mm256_add_pd(_mm256_mul_pd(b2v, _mm256_loadu_pd(v + i)),
                                         _mm256_mul_pd(c2v, _mm256_mul_pd(gv, gv)));
        _mm256_storeu_pd(m + i, mv);
        _mm256_storeu_pd(v + i, vv);
        const __m256d mhat = _mm256_div_pd(mv, bc1v);
        const __m256d vhat = _mm256_div_pd(vv, bc2v);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), epsv);
        const __m256d step = _mm256_mul_pd(lrv, _mm256_div_pd(mhat, denom));
        _mm256_storeu_pd(value + i, _mm256_sub_pd(_mm256_loadu_pd(value + i), step));
    }
    for (; i < len; ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * (g[i] * g[i]);
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        value[i] -= lr * (mhat / (std::sqrt(vhat) + eps));
    }
}

const KernelTable kAvx2Table = {
    "avx2",
    matmul_avx2,
    matmul_at_b_avx2,
    spmm_avx2,
    axpy_avx2,
    hadamard_avx2,
    relu_fwd_avx2,
    relu_bwd_avx2,
    scale_avx2,
    add_bias_avx2,
    colsum_avx2,
    adam_step_avx2,
};

} // namespace

const KernelTable& avx2_table() { return kAvx2Table; }

bool avx2_supported() { return __builtin_cpu_supports("avx2") != 0; }

} // namespace pcgcn::kernels
