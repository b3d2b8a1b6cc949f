#include "d2d/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "d2d/kern/kernels.hpp"
#include "d2d/util/rng.hpp"

namespace d2d::nn {

ParamSet zeros_like(const ParamSet& like) {
    ParamSet out;
    out.reserve(like.size());
    for (const auto& t : like) {
        out.push_back({t.name, t.shape, std::vector<double>(t.values.size(), 0.0)});
    }
    return out;
}

void MlpSpec::validate() const {
    if (layer_sizes.size() < 2) {
        throw std::invalid_argument("mlp spec needs at least input and output sizes");
    }
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw std::invalid_argument("mlp layer size must be positive");
    }
}

ParamSet make_mlp_params(const MlpSpec& spec, const std::string& prefix) {
    spec.validate();
    ParamSet out;
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
        const std::size_t fan_in = spec.layer_sizes[l];
        const std::size_t fan_out = spec.layer_sizes[l + 1];
        out.push_back({prefix + ".w" + std::to_string(l),
                       {fan_in, fan_out},
                       std::vector<double>(fan_in * fan_out, 0.0)});
        out.push_back({prefix + ".b" + std::to_string(l),
                       {fan_out},
                       std::vector<double>(fan_out, 0.0)});
    }
    return out;
}

void init_params(const MlpSpec& spec, ParamSet& params, std::uint64_t seed) {
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
        const double fan_in = static_cast<double>(spec.layer_sizes[l]);
        const double fan_out = static_cast<double>(spec.layer_sizes[l + 1]);
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& w : params[2 * l].values) w = rng.uniform(-a, a);
        for (double& b : params[2 * l + 1].values) b = rng.uniform(-a, a);
    }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace {

// y_row = b + x_row * W   (W input-major {fan_in, fan_out})
void affine_row(const double* x, const ParamTensor& w, const ParamTensor& b,
                double* y, std::size_t fan_in, std::size_t fan_out) {
    for (std::size_t o = 0; o < fan_out; ++o) y[o] = b.values[o];
    for (std::size_t k = 0; k < fan_in; ++k) {
        kern::axpy(y, x[k], w.values.data() + k * fan_out, fan_out);
    }
}

void apply_activation(const MlpSpec& spec, bool last, const Matrix& z, Matrix& a) {
    const std::size_t n = z.size();
    if (!last) {
        if (spec.hidden == Activation::Relu) {
            kern::relu(a.data(), z.data(), n);
        } else {
            a = z;
        }
        return;
    }
    if (spec.final == FinalActivation::Sigmoid) {
        for (std::size_t i = 0; i < n; ++i) a.data()[i] = sigmoid(z.data()[i]);
    } else {
        a = z;
    }
}

}  // namespace

Matrix mlp_forward(const MlpSpec& spec, const ParamTensor* params, const Matrix& x,
                   MlpTape& tape) {
    spec.validate();
    if (x.cols() != spec.input_size()) {
        throw std::invalid_argument("mlp input width " + std::to_string(x.cols()) +
                                    " != spec input " + std::to_string(spec.input_size()));
    }
    const std::size_t batch = x.rows();
    const std::size_t L = spec.n_layers();
    tape.input = x;
    tape.preacts.assign(L, Matrix());
    tape.acts.assign(L, Matrix());
    const Matrix* cur = &tape.input;
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t fan_in = spec.layer_sizes[l];
        const std::size_t fan_out = spec.layer_sizes[l + 1];
        Matrix z(batch, fan_out);
        for (std::size_t r = 0; r < batch; ++r) {
            affine_row(cur->row(r), params[2 * l], params[2 * l + 1], z.row(r), fan_in,
                       fan_out);
        }
        Matrix a(batch, fan_out);
        apply_activation(spec, l + 1 == L, z, a);
        tape.preacts[l] = std::move(z);
        tape.acts[l] = std::move(a);
        cur = &tape.acts[l];
    }
    tape.valid = true;
    return tape.acts.back();
}

Matrix mlp_forward(const MlpSpec& spec, const ParamSet& params, const Matrix& x,
                   MlpTape& tape) {
    return mlp_forward(spec, params.data(), x, tape);
}

Matrix mlp_forward(const MlpSpec& spec, const ParamSet& params, const Matrix& x) {
    MlpTape tape;
    return mlp_forward(spec, params.data(), x, tape);
}

Matrix mlp_backward(const MlpSpec& spec, const ParamTensor* params, MlpTape& tape,
                    const Matrix& upstream, ParamTensor* grads) {
    if (!tape.valid) throw std::logic_error("mlp_backward: tape already consumed");
    tape.valid = false;
    const std::size_t L = spec.n_layers();
    const std::size_t batch = tape.input.rows();
    if (upstream.rows() != batch || upstream.cols() != spec.output_size()) {
        throw std::invalid_argument("mlp_backward: upstream shape mismatch");
    }

    Matrix delta = upstream;  // gradient w.r.t. current layer activation
    for (std::size_t l = L; l-- > 0;) {
        const std::size_t fan_in = spec.layer_sizes[l];
        const std::size_t fan_out = spec.layer_sizes[l + 1];
        const Matrix& z = tape.preacts[l];

        // activation derivative
        Matrix dz(batch, fan_out);
        if (l + 1 == L) {
            if (spec.final == FinalActivation::Sigmoid) {
                const Matrix& a = tape.acts[l];
                for (std::size_t i = 0; i < dz.size(); ++i) {
                    const double s = a.data()[i];
                    dz.data()[i] = delta.data()[i] * s * (1.0 - s);
                }
            } else {
                dz = delta;
            }
        } else if (spec.hidden == Activation::Relu) {
            kern::relu_bwd(dz.data(), z.data(), delta.data(), dz.size());
        } else {
            dz = delta;
        }

        const Matrix& in = (l == 0) ? tape.input : tape.acts[l - 1];
        ParamTensor& gw = grads[2 * l];
        ParamTensor& gb = grads[2 * l + 1];
        Matrix din(batch, fan_in);
        for (std::size_t r = 0; r < batch; ++r) {
            const double* xr = in.row(r);
            const double* dzr = dz.row(r);
            kern::axpy(gb.values.data(), 1.0, dzr, fan_out);
            for (std::size_t k = 0; k < fan_in; ++k) {
                kern::axpy(gw.values.data() + k * fan_out, xr[k], dzr, fan_out);
                din(r, k) = kern::dot(dzr, params[2 * l].values.data() + k * fan_out,
                                      fan_out);
            }
        }
        delta = std::move(din);
    }
    return delta;
}

Matrix mlp_backward(const MlpSpec& spec, const ParamSet& params, MlpTape& tape,
                    const Matrix& upstream, ParamSet& grads) {
    return mlp_backward(spec, params.data(), tape, upstream, grads.data());
}

}  // namespace d2d::nn
