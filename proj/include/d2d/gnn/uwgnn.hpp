#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "d2d/nn/mlp.hpp"
#include "d2d/sim/graph.hpp"
#include "d2d/sim/network.hpp"

namespace d2d::gnn {

using nn::Matrix;
using sim::GraphSample;
using sim::NetworkInstance;

// How the five MLP input widths are chosen: derived from the update
// equations, or the literal published triples with zero-padded inputs.
enum class MlpMode { Equation, PaperTriples };

struct UwgnnConfig {
    std::size_t layers = 3;  // unrolled iterations K
    std::size_t d_u = 4;
    std::size_t d_w = 4;
    std::size_t d_msg = 16;
    std::size_t hidden_width = 8;
    MlpMode mlp_mode = MlpMode::Equation;
    nn::Activation hidden_act = nn::Activation::Relu;
    // With sharing on, layer 1 keeps its own parameter group (it runs from
    // the cold start v = sqrt(p_max), u = w = 0) and layers 2..K share one.
    bool share_parameters = true;

    std::array<std::size_t, 5> input_widths() const;
    std::array<std::size_t, 5> output_widths() const;
    nn::MlpSpec mlp_spec(std::size_t m) const;  // m in [0, 5)
    std::size_t n_groups() const;
    std::size_t group_of_layer(std::size_t k) const;
    void validate() const;
};

struct UwgnnModel {
    UwgnnConfig cfg;
    nn::ParamSet params;  // all groups, flat; 4 tensors per MLP, 5 MLPs per group

    const nn::ParamTensor* mlp(std::size_t group, std::size_t m) const;
    nn::ParamTensor* mlp(std::size_t group, std::size_t m);
    static std::size_t tensors_per_mlp() { return 4; }
};

UwgnnModel make_model(const UwgnnConfig& cfg, std::uint64_t seed);
UwgnnModel model_from_params(const UwgnnConfig& cfg, nn::ParamSet params);

// Node state after a layer: v in [0, sqrt(p_max)], plus the widened
// equalizer/weight features.
struct NodeState {
    std::vector<double> v;
    Matrix u;  // n x d_u
    Matrix w;  // n x d_w
};

// Saved activations for one layer, enough to replay it in reverse.
struct LayerTape {
    nn::MlpTape t1, t2, t3, t4, t5;
    std::vector<std::int32_t> argmax_u;  // n * d_msg edge ids, -1 when no neighbor
    std::vector<std::int32_t> argmax_v;
    std::vector<double> v_in;            // v consumed by this layer
};

struct ForwardTrace {
    std::vector<NodeState> states;  // one per layer
    std::vector<LayerTape> tapes;   // only filled when requested
    std::vector<double> p;          // final power, p_i = v_i^2
};

// One unrolled iteration. Aggregation 1 pools incoming-interference
// messages MLP1(h_ij, v_j) with an elementwise max; aggregation 2 pools
// caused-interference messages MLP4(h_ji, u_j, w_j) over outgoing edges.
// Nodes without neighbors aggregate the zero vector.
NodeState layer_forward(const UwgnnModel& model, std::size_t layer,
                        const GraphSample& graph, const NodeState& state,
                        LayerTape* tape = nullptr);

// K layers from v0 (default: full power). Returns p = v^2 of the last layer
// and the per-layer trace. with_tapes enables the reverse pass.
ForwardTrace forward(const UwgnnModel& model, const GraphSample& graph,
                     const std::vector<double>& v0, bool with_tapes = false);

// Unsupervised objective: negative weighted sum rate.
double loss(const NetworkInstance& inst, const std::vector<double>& p);
std::vector<double> loss_grad_p(const NetworkInstance& inst,
                                const std::vector<double>& p);

// Reverse pass through all layers. dp is dL/dp; parameter gradients are
// accumulated into grads (layout of model.params).
void backward(const UwgnnModel& model, const GraphSample& graph, ForwardTrace& trace,
              const std::vector<double>& dp, nn::ParamSet& grads);

// Convenience: graph build + forward with the full-power start.
std::vector<double> predict_power(const UwgnnModel& model, const NetworkInstance& inst);

}  // namespace d2d::gnn
