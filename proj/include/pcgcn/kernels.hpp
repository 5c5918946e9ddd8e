#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pcgcn::kernels {

// Arithmetic inner loops behind the tensor ops. Two implementations exist:
// a scalar reference and an AVX2 variant selected at runtime. Both produce
// bitwise-identical results: every accumulation runs in the same order in
// both variants (SIMD lanes only span independent output elements) and
// neither uses fused multiply-add. The project is built with
// -ffp-contract=off so the compiler cannot break this contract either.
struct KernelTable {
    const char* name;

    /// c(n,m) = a(n,k) * b(k,m), row-major. accumulate=true adds instead of
    /// overwriting. Per-element summation order: ascending k.
    void (*matmul)(double* c, const double* a, const double* b,
                   std::size_t n, std::size_t k, std::size_t m, bool accumulate);

    /// c(k,m) += a(n,k)^T * b(n,m). Per-element summation order: ascending n.
    void (*matmul_at_b)(double* c, const double* a, const double* b,
                        std::size_t n, std::size_t k, std::size_t m);

    /// c(n,m) = A * b where A is square CSR (row_offsets/cols/vals).
    /// Per-row accumulation order: ascending column index.
    void (*spmm)(double* c, const std::int32_t* row_offsets, const std::int32_t* cols,
                 const double* vals, std::size_t n, const double* b, std::size_t m);

    /// y += alpha * x
    void (*axpy)(double* y, const double* x, double alpha, std::size_t len);

    /// y = a .* b (y may alias a)
    void (*hadamard)(double* y, const double* a, const double* b, std::size_t len);

    /// y = max(x, 0); the subgradient at 0 is 0 (relu_bwd masks on x > 0).
    void (*relu_fwd)(double* y, const double* x, std::size_t len);

    /// dx += dy .* (x > 0)
    void (*relu_bwd)(double* dx, const double* dy, const double* x, std::size_t len);

    /// y = s * x (y may alias x)
    void (*scale)(double* y, const double* x, double s, std::size_t len);

    /// y(n,m) rows += bias(m)
    void (*add_bias)(double* y, const double* bias, std::size_t n, std::size_t m);

    /// out(m) += column sums of a(n,m), ascending row order.
    void (*colsum)(double* out, const double* a, std::size_t n, std::size_t m);

    /// Bias-corrected adaptive-moment step on one flat buffer:
    ///   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g*g
    ///   value -= lr * (m/bc1) / (sqrt(v/bc2) + eps)
    void (*adam_step)(double* value, double* m, double* v, const double* g,
                      std::size_t len, double lr, double b1, double b2,
                      double eps, double bc1, double bc2);
};

const KernelTable& scalar_table();
bool avx2_supported();
const KernelTable& avx2_table(); // only call when avx2_supported()

/// Active table: PCGCN_KERNELS env var ("scalar"/"avx2") if set, else the
/// widest variant the CPU supports.
const KernelTable& active();

/// Force a variant by name; returns false if unknown or unsupported.
bool select(std::string_view name);

std::vector<std::string> available();

} // namespace pcgcn::kernels
