#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2d/nn/tensor.hpp"

namespace d2d::nn {

enum class Activation { Relu, None };
enum class FinalActivation { None, Sigmoid };

// Fully-connected network description. layer_sizes = {d_in, hidden..., d_out}.
struct MlpSpec {
    std::vector<std::size_t> layer_sizes;
    Activation hidden = Activation::Relu;
    FinalActivation final = FinalActivation::None;

    std::size_t n_layers() const { return layer_sizes.size() - 1; }
    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }

    void validate() const;  // throws std::invalid_argument
};

// Weights are stored input-major: tensor "<prefix>.w<l>" has shape
// {fan_in, fan_out} so that one input feature scales a contiguous row of
// outputs. Biases "<prefix>.b<l>" have shape {fan_out}.
ParamSet make_mlp_params(const MlpSpec& spec, const std::string& prefix);

// Glorot-style uniform init over [-a, a], a = sqrt(6 / (fan_in + fan_out)),
// applied to weights and biases of each layer. Deterministic per seed.
void init_params(const MlpSpec& spec, ParamSet& params, std::uint64_t seed);

// Activation tape for one batched forward pass. Holds the layer inputs and
// pre-activations needed to replay the chain in reverse.
struct MlpTape {
    Matrix input;                 // batch x d_in
    std::vector<Matrix> preacts;  // per layer, batch x fan_out
    std::vector<Matrix> acts;     // post-activation outputs per layer
    bool valid = false;

    const Matrix& output() const { return acts.back(); }
};

// Batched forward. Rows are independent; the result of a row never depends
// on its position in the batch. The pointer forms address a 2*n_layers
// tensor block inside a larger parameter set.
Matrix mlp_forward(const MlpSpec& spec, const ParamTensor* params, const Matrix& x,
                   MlpTape& tape);
Matrix mlp_forward(const MlpSpec& spec, const ParamSet& params, const Matrix& x);
Matrix mlp_forward(const MlpSpec& spec, const ParamSet& params, const Matrix& x,
                   MlpTape& tape);

// Reverse pass. Accumulates parameter gradients into `grads` (same layout as
// params) and returns the gradient w.r.t. the input matrix. Consumes the
// tape; reusing a spent tape throws.
Matrix mlp_backward(const MlpSpec& spec, const ParamTensor* params, MlpTape& tape,
                    const Matrix& upstream, ParamTensor* grads);
Matrix mlp_backward(const MlpSpec& spec, const ParamSet& params, MlpTape& tape,
                    const Matrix& upstream, ParamSet& grads);

double sigmoid(double x);

}  // namespace d2d::nn
