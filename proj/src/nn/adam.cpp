#include "d2d/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "d2d/kern/kernels.hpp"

namespace d2d::nn {

Adam::Adam(const ParamSet& params, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    if (lr <= 0.0) throw std::invalid_argument("adam: lr must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw std::invalid_argument("adam: betas must lie in [0, 1)");
    }
    m_ = zeros_like(params);
    v_ = zeros_like(params);
}

void Adam::step(ParamSet& params, const ParamSet& grads) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("adam: parameter/gradient set size mismatch");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        for (double g : grads[i].values) {
            if (!std::isfinite(g)) {
                throw std::runtime_error("adam: non-finite gradient in tensor '" +
                                         grads[i].name + "'");
            }
        }
    }
    ++t_;
    const double bc1 = 1.0 / (1.0 - std::pow(beta1_, static_cast<double>(t_)));
    const double bc2 = 1.0 / (1.0 - std::pow(beta2_, static_cast<double>(t_)));
    const kern::AdamStep step{lr_, beta1_, beta2_, eps_, bc1, bc2};
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].values.size() != grads[i].values.size()) {
            throw std::invalid_argument("adam: shape mismatch for tensor '" +
                                        params[i].name + "'");
        }
        kern::adam(params[i].values.data(), m_[i].values.data(), v_[i].values.data(),
                   grads[i].values.data(), params[i].values.size(), step);
    }
}

}  // namespace d2d::nn
