#include "pcgcn/adam.hpp"

#include <cmath>

#include "pcgcn/errors.hpp"
#include "pcgcn/kernels.hpp"

namespace pcgcn {

Adam::Adam(std::vector<Parameter*> params, double lr, double weight_decay,
           double beta1, double beta2, double epsilon)
    : params_(std::move(params)), lr_(lr), wd_(weight_decay),
      b1_(beta1), b2_(beta2), eps_(epsilon) {
    if (!(lr_ > 0.0)) throw ConfigError("adam: lr must be positive");
    if (wd_ < 0.0) throw ConfigError("adam: weight decay must be nonnegative");
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Parameter* p : params_) {
        m_.emplace_back(p->value.rows, p->value.cols);
        v_.emplace_back(p->value.rows, p->value.cols);
    }
}

void Adam::step() {
    ++step_;
    const double bc1 = 1.0 - std::pow(b1_, double(step_));
    const double bc2 = 1.0 - std::pow(b2_, double(step_));
    const auto& k = kernels::active();
    const double decay = 1.0 - lr_ * wd_;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Parameter& p = *params_[i];
        if (wd_ != 0.0) k.scale(p.value.data(), p.value.data(), decay, p.value.size());
        k.adam_step(p.value.data(), m_[i].data(), v_[i].data(), p.grad.data(),
                    p.value.size(), lr_, b1_, b2_, eps_, bc1, bc2);
        p.grad.zero();
    }
}

} // namespace pcgcn
