#pragma once

#include <cstdint>
#include <vector>

#include "pcgcn/dense.hpp"
#include "pcgcn/graph.hpp"
#include "pcgcn/rng.hpp"

namespace pcgcn::ops {

/// c = Â·m, row-by-row CSR product, per-row summation in ascending column
/// order. Â is symmetric, so the backward pass is spmm with dOut.
DenseMatrix spmm(const NormalizedAdjacency& a, const DenseMatrix& m);

/// c = a·b.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// dA += dOut·bᵀ, dB += aᵀ·dOut. Either output may be null to skip.
void matmul_backward(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& d_out,
                     DenseMatrix* d_a, DenseMatrix* d_b);

/// Elementwise max(0, x). Backward masks by x > 0 (subgradient 0 at 0).
DenseMatrix relu(const DenseMatrix& m);
void relu_backward(const DenseMatrix& x, const DenseMatrix& d_out, DenseMatrix& d_x);

/// Row r maps to exp((x − max)/τ) / Σ. Throws ConfigError when τ ≤ 0.
DenseMatrix row_softmax(const DenseMatrix& m, double temperature = 1.0);

/// Summed negative log-likelihood over masked rows (mean_reduction divides
/// by the masked count). Throws ConfigError on an empty mask.
double masked_cross_entropy(const DenseMatrix& logits, const LabelSet& labels,
                            const std::vector<bool>& mask, bool mean_reduction = false);

/// d_logits += weight * (softmax(logits_i) − onehot(y_i)) on masked rows.
/// mean_reduction divides weight by the masked count, matching the forward.
void masked_cross_entropy_backward(const DenseMatrix& logits, const LabelSet& labels,
                                   const std::vector<bool>& mask, DenseMatrix& d_logits,
                                   double weight = 1.0, bool mean_reduction = false);

/// Inverted dropout. Training: zero entries with probability p, scale
/// survivors by 1/(1−p), consuming one uniform draw per entry; evaluation or
/// p=0: identity, consuming none. mask_out (optional) receives the applied
/// elementwise factor for the backward pass. Throws ConfigError unless
/// 0 ≤ p < 1.
DenseMatrix dropout(const DenseMatrix& m, double p, bool training, Rng& rng,
                    DenseMatrix* mask_out = nullptr);

/// Argmax of one row, ties broken to the lowest index.
std::int32_t argmax_row(const double* row, std::int32_t cols);

} // namespace pcgcn::ops
