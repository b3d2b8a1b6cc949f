#pragma once

#include <cstdint>
#include <vector>

#include "d2d/nn/tensor.hpp"

namespace d2d::nn {

// Adam with bias correction. Moment buffers mirror the parameter layout.
class Adam {
public:
    explicit Adam(const ParamSet& params, double lr = 1e-3, double beta1 = 0.9,
                  double beta2 = 0.999, double eps = 1e-8);

    // One update from accumulated gradients. Throws on non-finite gradient,
    // naming the offending tensor.
    void step(ParamSet& params, const ParamSet& grads);

    std::uint64_t t() const { return t_; }
    double lr() const { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::uint64_t t_ = 0;
    ParamSet m_, v_;
};

}  // namespace d2d::nn
