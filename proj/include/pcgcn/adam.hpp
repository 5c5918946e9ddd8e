#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcgcn/dense.hpp"

namespace pcgcn {

/// A trainable tensor with its gradient slot. Gradients accumulate across a
/// backward pass and are consumed (zeroed) by the optimizer step.
struct Parameter {
    std::string name;
    DenseMatrix value;
    DenseMatrix grad;

    Parameter() = default;
    Parameter(std::string n, std::size_t r, std::size_t c)
        : name(std::move(n)), value(r, c), grad(r, c) {}

    double scalar() const { return value.values[0]; }
};

/// Bias-corrected adaptive-moment optimizer with decoupled weight decay:
/// each step first applies value *= (1 - lr*wd), then the moment update,
/// then zeroes the gradients. The parameter set is fixed at construction.
class Adam {
public:
    Adam(std::vector<Parameter*> params, double lr, double weight_decay,
         double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

    void step();
    std::int64_t step_count() const { return step_; }

private:
    std::vector<Parameter*> params_;
    std::vector<DenseMatrix> m_, v_;
    double lr_, wd_, b1_, b2_, eps_;
    std::int64_t step_ = 0;
};

} // namespace pcgcn
