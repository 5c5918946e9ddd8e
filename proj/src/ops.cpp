#include "pcgcn/ops.hpp"

#include <cmath>
#include <string>

#include "pcgcn/errors.hpp"
#include "pcgcn/kernels.hpp"

namespace pcgcn::ops {
namespace {

[[noreturn]] void shape_fail(const char* op, const DenseMatrix& a, const DenseMatrix& b) {
    throw ShapeError(std::string(op) + ": shapes (" + std::to_string(a.rows) + "x" +
                     std::to_string(a.cols) + ") and (" + std::to_string(b.rows) + "x" +
                     std::to_string(b.cols) + ") do not align");
}

} // namespace

DenseMatrix spmm(const NormalizedAdjacency& a, const DenseMatrix& m) {
    if (static_cast<std::size_t>(a.num_nodes) != m.rows) {
        throw ShapeError("spmm: adjacency has " + std::to_string(a.num_nodes) +
                         " nodes but matrix has " + std::to_string(m.rows) + " rows");
    }
    DenseMatrix c(m.rows, m.cols);
    kernels::active().spmm(c.data(), a.row_offsets.data(), a.col_indices.data(),
                           a.values.data(), m.rows, m.data(), m.cols);
    return c;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols != b.rows) shape_fail("matmul", a, b);
    DenseMatrix c(a.rows, b.cols);
    kernels::active().matmul(c.data(), a.data(), b.data(), a.rows, a.cols, b.cols, false);
    return c;
}

void matmul_backward(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& d_out,
                     DenseMatrix* d_a, DenseMatrix* d_b) {
    if (a.cols != b.rows) shape_fail("matmul_backward", a, b);
    if (d_out.rows != a.rows || d_out.cols != b.cols) shape_fail("matmul_backward", a, d_out);
    if (d_a) {
        if (!d_a->same_shape(a)) shape_fail("matmul_backward", *d_a, a);
        const DenseMatrix bt = transpose(b);
        kernels::active().matmul(d_a->data(), d_out.data(), bt.data(),
                                 d_out.rows, d_out.cols, bt.cols, true);
    }
    if (d_b) {
        if (!d_b->same_shape(b)) shape_fail("matmul_backward", *d_b, b);
        kernels::active().matmul_at_b(d_b->data(), a.data(), d_out.data(),
                                      a.rows, a.cols, d_out.cols);
    }
}

DenseMatrix relu(const DenseMatrix& m) {
    DenseMatrix y(m.rows, m.cols);
    kernels::active().relu_fwd(y.data(), m.data(), m.size());
    return y;
}

void relu_backward(const DenseMatrix& x, const DenseMatrix& d_out, DenseMatrix& d_x) {
    if (!x.same_shape(d_out) || !x.same_shape(d_x)) shape_fail("relu_backward", x, d_out);
    kernels::active().relu_bwd(d_x.data(), d_out.data(), x.data(), x.size());
}

DenseMatrix row_softmax(const DenseMatrix& m, double temperature) {
    if (!(temperature > 0.0)) {
        throw ConfigError("row_softmax: temperature must be positive, got " +
                          std::to_string(temperature));
    }
    DenseMatrix out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* x = m.row(i);
        double* y = out.row(i);
        double mx = x[0];
        for (std::size_t j = 1; j < m.cols; ++j) mx = x[j] > mx ? x[j] : mx;
        double sum = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) {
            y[j] = std::exp((x[j] - mx) / temperature);
            sum += y[j];
        }
        for (std::size_t j = 0; j < m.cols; ++j) y[j] /= sum;
    }
    return out;
}

namespace {

std::size_t check_ce_inputs(const char* who, const DenseMatrix& logits, const LabelSet& labels,
                            const std::vector<bool>& mask) {
    if (logits.rows != labels.labels.size() || mask.size() != logits.rows) {
        throw ShapeError(std::string(who) + ": row counts disagree");
    }
    if (logits.cols != static_cast<std::size_t>(labels.num_classes)) {
        throw ShapeError(std::string(who) + ": logit width " + std::to_string(logits.cols) +
                         " != num_classes " + std::to_string(labels.num_classes));
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        if (labels.labels[i] == kUnlabeled) {
            throw DataError(std::string(who) + ": masked node " + std::to_string(i) +
                            " has no label");
        }
        ++count;
    }
    if (count == 0) throw ConfigError(std::string(who) + ": mask selects no node");
    return count;
}

} // namespace

double masked_cross_entropy(const DenseMatrix& logits, const LabelSet& labels,
                            const std::vector<bool>& mask, bool mean_reduction) {
    const std::size_t count = check_ce_inputs("masked_cross_entropy", logits, labels, mask);
    double loss = 0.0;
    for (std::size_t i = 0; i < logits.rows; ++i) {
        if (!mask[i]) continue;
        const double* x = logits.row(i);
        double mx = x[0];
        for (std::size_t j = 1; j < logits.cols; ++j) mx = x[j] > mx ? x[j] : mx;
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols; ++j) sum += std::exp(x[j] - mx);
        const auto y = static_cast<std::size_t>(labels.labels[i]);
        loss += std::log(sum) + mx - x[y];
    }
    return mean_reduction ? loss / double(count) : loss;
}

void masked_cross_entropy_backward(const DenseMatrix& logits, const LabelSet& labels,
                                   const std::vector<bool>& mask, DenseMatrix& d_logits,
                                   double weight, bool mean_reduction) {
    const std::size_t count = check_ce_inputs("masked_cross_entropy_backward", logits, labels, mask);
    if (!d_logits.same_shape(logits)) shape_fail("masked_cross_entropy_backward", d_logits, logits);
    const double w = mean_reduction ? weight / double(count) : weight;
    for (std::size_t i = 0; i < logits.rows; ++i) {
        if (!mask[i]) continue;
        const double* x = logits.row(i);
        double* d = d_logits.row(i);
        double mx = x[0];
        for (std::size_t j = 1; j < logits.cols; ++j) mx = x[j] > mx ? x[j] : mx;
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols; ++j) sum += std::exp(x[j] - mx);
        for (std::size_t j = 0; j < logits.cols; ++j) {
            d[j] += w * (std::exp(x[j] - mx) / sum);
        }
        d[static_cast<std::size_t>(labels.labels[i])] -= w;
    }
}

DenseMatrix dropout(const DenseMatrix& m, double p, bool training, Rng& rng,
                    DenseMatrix* mask_out) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw ConfigError("dropout: rate must be in [0, 1), got " + std::to_string(p));
    }
    if (!training || p == 0.0) {
        if (mask_out) {
            *mask_out = DenseMatrix(m.rows, m.cols);
            std::fill(mask_out->values.begin(), mask_out->values.end(), 1.0);
        }
        return m;
    }
    DenseMatrix mask(m.rows, m.cols);
    const double keep_scale = 1.0 / (1.0 - p);
    for (double& v : mask.values) v = rng.uniform() < p ? 0.0 : keep_scale;
    DenseMatrix out(m.rows, m.cols);
    kernels::active().hadamard(out.data(), m.data(), mask.data(), m.size());
    if (mask_out) *mask_out = std::move(mask);
    return out;
}

std::int32_t argmax_row(const double* row, std::int32_t cols) {
    std::int32_t best = 0;
    for (std::int32_t j = 1; j < cols; ++j) {
        if (row[j] > row[best]) best = j;
    }
    return best;
}

} // namespace pcgcn::ops
