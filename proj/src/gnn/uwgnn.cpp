#include "d2d/gnn/uwgnn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "d2d/util/rng.hpp"
#include "d2d/wmmse/solver.hpp"

namespace d2d::gnn {

namespace {
const char* kGroupNamesShared[2] = {"entry", "shared"};
}

std::array<std::size_t, 5> UwgnnConfig::input_widths() const {
    if (mlp_mode == MlpMode::PaperTriples) {
        if (d_u != 4 || d_w != 4 || d_msg != 16) {
            throw std::invalid_argument(
                "paper-triples mlp mode requires d_u = d_w = 4, d_msg = 16");
        }
        return {5, 19, 7, 10, 27};
    }
    return {2, 2 + d_msg, 2 + d_u, 1 + d_u + d_w, 2 + d_u + d_w + d_msg};
}

std::array<std::size_t, 5> UwgnnConfig::output_widths() const {
    return {d_msg, d_u, d_w, d_msg, 1};
}

nn::MlpSpec UwgnnConfig::mlp_spec(std::size_t m) const {
    nn::MlpSpec spec;
    spec.layer_sizes = {input_widths()[m], hidden_width, output_widths()[m]};
    spec.hidden = hidden_act;
    spec.final = (m == 4) ? nn::FinalActivation::Sigmoid : nn::FinalActivation::None;
    return spec;
}

std::size_t UwgnnConfig::n_groups() const {
    if (layers == 0) return 0;
    return share_parameters ? std::min<std::size_t>(layers, 2) : layers;
}

std::size_t UwgnnConfig::group_of_layer(std::size_t k) const {
    return share_parameters ? std::min<std::size_t>(k, 1) : k;
}

void UwgnnConfig::validate() const {
    if (d_u == 0 || d_w == 0 || d_msg == 0 || hidden_width == 0) {
        throw std::invalid_argument("uwgnn: feature widths must be positive");
    }
    input_widths();  // validates paper-triples constraints
}

const nn::ParamTensor* UwgnnModel::mlp(std::size_t group, std::size_t m) const {
    return params.data() + (group * 5 + m) * tensors_per_mlp();
}

nn::ParamTensor* UwgnnModel::mlp(std::size_t group, std::size_t m) {
    return params.data() + (group * 5 + m) * tensors_per_mlp();
}

UwgnnModel make_model(const UwgnnConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    UwgnnModel model;
    model.cfg = cfg;
    for (std::size_t g = 0; g < cfg.n_groups(); ++g) {
        const std::string gname = cfg.share_parameters
                                      ? kGroupNamesShared[g]
                                      : "layer" + std::to_string(g);
        for (std::size_t m = 0; m < 5; ++m) {
            const auto spec = cfg.mlp_spec(m);
            auto block = nn::make_mlp_params(spec, gname + ".mlp" + std::to_string(m + 1));
            nn::init_params(spec, block,
                            derive_seed(seed, "uwgnn." + gname + ".mlp", m));
            for (auto& t : block) model.params.push_back(std::move(t));
        }
    }
    return model;
}

UwgnnModel model_from_params(const UwgnnConfig& cfg, nn::ParamSet params) {
    cfg.validate();
    UwgnnModel model;
    model.cfg = cfg;
    model.params = std::move(params);
    const std::size_t expected = cfg.n_groups() * 5 * UwgnnModel::tensors_per_mlp();
    if (model.params.size() != expected) {
        throw std::invalid_argument("uwgnn: parameter set has " +
                                    std::to_string(model.params.size()) +
                                    " tensors, config expects " + std::to_string(expected));
    }
    for (std::size_t g = 0; g < cfg.n_groups(); ++g) {
        for (std::size_t m = 0; m < 5; ++m) {
            const auto spec = cfg.mlp_spec(m);
            const nn::ParamTensor* block = model.mlp(g, m);
            for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
                const std::size_t fi = spec.layer_sizes[l];
                const std::size_t fo = spec.layer_sizes[l + 1];
                if (block[2 * l].values.size() != fi * fo ||
                    block[2 * l + 1].values.size() != fo) {
                    throw std::invalid_argument("uwgnn: tensor shape mismatch at " +
                                                block[2 * l].name);
                }
            }
        }
    }
    return model;
}

namespace {

// Fills a feature row, zero-padding up to the spec width (paper-triples mode).
struct RowWriter {
    double* row;
    std::size_t pos = 0;
    void put(double v) { row[pos++] = v; }
    void put(const double* v, std::size_t k) {
        for (std::size_t i = 0; i < k; ++i) row[pos++] = v[i];
    }
};

// Elementwise max over a message group; strict > keeps the first (lowest
// scan position) maximizer, which fixes subgradient routing on ties.
void pool_group(const Matrix& messages, const std::size_t* ids, std::size_t count,
                bool indirect, std::size_t node, std::size_t first, Matrix& pooled,
                std::int32_t* argmax, std::size_t d_msg) {
    if (count == 0) {
        for (std::size_t t = 0; t < d_msg; ++t) {
            pooled(node, t) = 0.0;
            if (argmax != nullptr) argmax[t] = -1;
        }
        return;
    }
    const std::size_t e0 = indirect ? ids[first] : first;
    const double* m0 = messages.row(e0);
    for (std::size_t t = 0; t < d_msg; ++t) {
        pooled(node, t) = m0[t];
        if (argmax != nullptr) argmax[t] = static_cast<std::int32_t>(e0);
    }
    for (std::size_t c = 1; c < count; ++c) {
        const std::size_t e = indirect ? ids[first + c] : first + c;
        const double* m = messages.row(e);
        for (std::size_t t = 0; t < d_msg; ++t) {
            if (m[t] > pooled(node, t)) {
                pooled(node, t) = m[t];
                if (argmax != nullptr) argmax[t] = static_cast<std::int32_t>(e);
            }
        }
    }
}

}  // namespace

NodeState layer_forward(const UwgnnModel& model, std::size_t layer,
                        const GraphSample& graph, const NodeState& state,
                        LayerTape* tape) {
    const UwgnnConfig& cfg = model.cfg;
    const std::size_t n = graph.n;
    const std::size_t E = graph.edges.size();
    const std::size_t g = cfg.group_of_layer(layer);
    if (graph.d_u != cfg.d_u || graph.d_w != cfg.d_w) {
        throw std::invalid_argument("uwgnn: graph feature widths do not match config");
    }
    if (state.v.size() != n) {
        throw std::invalid_argument("uwgnn: state size does not match graph");
    }
    const auto in_w = cfg.input_widths();

    nn::MlpTape local1, local2, local3, local4, local5;
    nn::MlpTape& t1 = tape != nullptr ? tape->t1 : local1;
    nn::MlpTape& t2 = tape != nullptr ? tape->t2 : local2;
    nn::MlpTape& t3 = tape != nullptr ? tape->t3 : local3;
    nn::MlpTape& t4 = tape != nullptr ? tape->t4 : local4;
    nn::MlpTape& t5 = tape != nullptr ? tape->t5 : local5;
    if (tape != nullptr) {
        tape->v_in = state.v;
        tape->argmax_u.assign(n * cfg.d_msg, -1);
        tape->argmax_v.assign(n * cfg.d_msg, -1);
    }

    // Stage 1: incoming interference. Message on edge (i <- j) sees the
    // edge gain and the interferer's power.
    Matrix x1(E, in_w[0]);
    for (std::size_t e = 0; e < E; ++e) {
        const auto& ed = graph.edges[e];
        RowWriter row{x1.row(e)};
        row.put(graph.a(ed.rcv, ed.src));
        row.put(state.v[ed.src]);
    }
    const Matrix m1 = nn::mlp_forward(cfg.mlp_spec(0), model.mlp(g, 0), x1, t1);

    Matrix alpha_u(n, cfg.d_msg);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t first = graph.in_offsets[i];
        const std::size_t count = graph.in_offsets[i + 1] - first;
        pool_group(m1, nullptr, count, false, i, first, alpha_u,
                   tape != nullptr ? tape->argmax_u.data() + i * cfg.d_msg : nullptr,
                   cfg.d_msg);
    }

    Matrix x2(n, in_w[1]);
    for (std::size_t i = 0; i < n; ++i) {
        RowWriter row{x2.row(i)};
        row.put(graph.h_direct(i));
        row.put(state.v[i]);
        row.put(alpha_u.row(i), cfg.d_msg);
    }
    NodeState next;
    next.u = nn::mlp_forward(cfg.mlp_spec(1), model.mlp(g, 1), x2, t2);

    Matrix x3(n, in_w[2]);
    for (std::size_t i = 0; i < n; ++i) {
        RowWriter row{x3.row(i)};
        row.put(graph.h_direct(i));
        row.put(state.v[i]);
        row.put(next.u.row(i), cfg.d_u);
    }
    next.w = nn::mlp_forward(cfg.mlp_spec(2), model.mlp(g, 2), x3, t3);

    // Stage 2: caused interference. Message on edge (j <- i), pooled at the
    // source i, sees the transposed gain and the receiver's u, w.
    Matrix x4(E, in_w[3]);
    for (std::size_t e = 0; e < E; ++e) {
        const auto& ed = graph.edges[e];
        RowWriter row{x4.row(e)};
        row.put(graph.a(ed.rcv, ed.src));
        row.put(next.u.row(ed.rcv), cfg.d_u);
        row.put(next.w.row(ed.rcv), cfg.d_w);
    }
    const Matrix m4 = nn::mlp_forward(cfg.mlp_spec(3), model.mlp(g, 3), x4, t4);

    Matrix alpha_v(n, cfg.d_msg);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t first = graph.out_offsets[i];
        const std::size_t count = graph.out_offsets[i + 1] - first;
        pool_group(m4, graph.out_edge_ids.data(), count, true, i, first, alpha_v,
                   tape != nullptr ? tape->argmax_v.data() + i * cfg.d_msg : nullptr,
                   cfg.d_msg);
    }

    Matrix x5(n, in_w[4]);
    for (std::size_t i = 0; i < n; ++i) {
        RowWriter row{x5.row(i)};
        row.put(graph.lambda(i));
        row.put(graph.h_direct(i));
        row.put(next.u.row(i), cfg.d_u);
        row.put(next.w.row(i), cfg.d_w);
        row.put(alpha_v.row(i), cfg.d_msg);
    }
    const Matrix gate = nn::mlp_forward(cfg.mlp_spec(4), model.mlp(g, 4), x5, t5);

    const double v_cap = std::sqrt(graph.p_max);
    next.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) next.v[i] = v_cap * gate(i, 0);
    return next;
}

ForwardTrace forward(const UwgnnModel& model, const GraphSample& graph,
                     const std::vector<double>& v0, bool with_tapes) {
    if (v0.size() != graph.n) throw std::invalid_argument("uwgnn: v0 length mismatch");
    ForwardTrace trace;
    NodeState state;
    state.v = v0;
    state.u = Matrix(graph.n, model.cfg.d_u);
    state.w = Matrix(graph.n, model.cfg.d_w);
    if (with_tapes) trace.tapes.resize(model.cfg.layers);
    for (std::size_t k = 0; k < model.cfg.layers; ++k) {
        state = layer_forward(model, k, graph, state,
                              with_tapes ? &trace.tapes[k] : nullptr);
        trace.states.push_back(state);
    }
    const std::vector<double>& v_final =
        trace.states.empty() ? v0 : trace.states.back().v;
    trace.p.resize(graph.n);
    for (std::size_t i = 0; i < graph.n; ++i) trace.p[i] = v_final[i] * v_final[i];
    return trace;
}

double loss(const NetworkInstance& inst, const std::vector<double>& p) {
    return -wmmse::sum_rate(inst, p);
}

std::vector<double> loss_grad_p(const NetworkInstance& inst,
                                const std::vector<double>& p) {
    const std::size_t n = inst.n_users;
    const double ln2 = std::log(2.0);
    std::vector<double> signal(n), interf(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hii = inst.h(i, i);
        signal[i] = hii * hii * p[i];
        double acc = inst.sigma2;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double hij = inst.h(i, j);
            acc += hij * hij * p[j];
        }
        interf[i] = acc;
    }
    std::vector<double> grad(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double hkk = inst.h(k, k);
        double g = inst.lambda[k] / ln2 * hkk * hkk / (interf[k] + signal[k]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const double hik = inst.h(i, k);
            g -= inst.lambda[i] / ln2 * signal[i] * hik * hik /
                 ((interf[i] + signal[i]) * interf[i]);
        }
        grad[k] = -g;  // loss is the negated rate
    }
    return grad;
}

void backward(const UwgnnModel& model, const GraphSample& graph, ForwardTrace& trace,
              const std::vector<double>& dp, nn::ParamSet& grads) {
    const UwgnnConfig& cfg = model.cfg;
    const std::size_t n = graph.n;
    const std::size_t E = graph.edges.size();
    const std::size_t K = cfg.layers;
    if (trace.tapes.size() != K) {
        throw std::logic_error("uwgnn backward: trace has no tapes");
    }
    if (grads.size() != model.params.size()) {
        throw std::invalid_argument("uwgnn backward: gradient layout mismatch");
    }
    if (K == 0) return;  // p = v0^2, nothing trainable in the path
    const double v_cap = std::sqrt(graph.p_max);

    // dL/dv with v the output of the last layer
    std::vector<double> dv(n);
    const std::vector<double>& v_final = trace.states.back().v;
    for (std::size_t i = 0; i < n; ++i) dv[i] = 2.0 * v_final[i] * dp[i];

    for (std::size_t k = K; k-- > 0;) {
        LayerTape& tape = trace.tapes[k];
        const std::size_t g = cfg.group_of_layer(k);
        nn::ParamTensor* g1 = grads.data() + (g * 5 + 0) * UwgnnModel::tensors_per_mlp();
        nn::ParamTensor* g2 = grads.data() + (g * 5 + 1) * UwgnnModel::tensors_per_mlp();
        nn::ParamTensor* g3 = grads.data() + (g * 5 + 2) * UwgnnModel::tensors_per_mlp();
        nn::ParamTensor* g4 = grads.data() + (g * 5 + 3) * UwgnnModel::tensors_per_mlp();
        nn::ParamTensor* g5 = grads.data() + (g * 5 + 4) * UwgnnModel::tensors_per_mlp();

        // v_i = sqrt(p_max) * mlp5(...); the sigmoid lives inside the mlp
        Matrix up5(n, 1);
        for (std::size_t i = 0; i < n; ++i) up5(i, 0) = v_cap * dv[i];
        const Matrix dx5 =
            nn::mlp_backward(cfg.mlp_spec(4), model.mlp(g, 4), tape.t5, up5, g5);

        Matrix du(n, cfg.d_u), dw(n, cfg.d_w);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < cfg.d_u; ++t) du(i, t) = dx5(i, 2 + t);
            for (std::size_t t = 0; t < cfg.d_w; ++t) dw(i, t) = dx5(i, 2 + cfg.d_u + t);
        }

        // route the pooled-message gradient to each argmax edge
        Matrix dm4(E, cfg.d_msg);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < cfg.d_msg; ++t) {
                const std::int32_t e = tape.argmax_v[i * cfg.d_msg + t];
                if (e >= 0) {
                    dm4(static_cast<std::size_t>(e), t) +=
                        dx5(i, 2 + cfg.d_u + cfg.d_w + t);
                }
            }
        }
        const Matrix dx4 =
            nn::mlp_backward(cfg.mlp_spec(3), model.mlp(g, 3), tape.t4, dm4, g4);
        for (std::size_t e = 0; e < E; ++e) {
            const auto& ed = graph.edges[e];
            for (std::size_t t = 0; t < cfg.d_u; ++t) du(ed.rcv, t) += dx4(e, 1 + t);
            for (std::size_t t = 0; t < cfg.d_w; ++t) {
                dw(ed.rcv, t) += dx4(e, 1 + cfg.d_u + t);
            }
        }

        std::vector<double> dv_prev(n, 0.0);
        const Matrix dx3 =
            nn::mlp_backward(cfg.mlp_spec(2), model.mlp(g, 2), tape.t3, dw, g3);
        for (std::size_t i = 0; i < n; ++i) {
            dv_prev[i] += dx3(i, 1);
            for (std::size_t t = 0; t < cfg.d_u; ++t) du(i, t) += dx3(i, 2 + t);
        }

        const Matrix dx2 =
            nn::mlp_backward(cfg.mlp_spec(1), model.mlp(g, 1), tape.t2, du, g2);
        Matrix dm1(E, cfg.d_msg);
        for (std::size_t i = 0; i < n; ++i) {
            dv_prev[i] += dx2(i, 1);
            for (std::size_t t = 0; t < cfg.d_msg; ++t) {
                const std::int32_t e = tape.argmax_u[i * cfg.d_msg + t];
                if (e >= 0) dm1(static_cast<std::size_t>(e), t) += dx2(i, 2 + t);
            }
        }
        const Matrix dx1 =
            nn::mlp_backward(cfg.mlp_spec(0), model.mlp(g, 0), tape.t1, dm1, g1);
        for (std::size_t e = 0; e < E; ++e) {
            dv_prev[graph.edges[e].src] += dx1(e, 1);
        }
        dv = std::move(dv_prev);
    }
}

std::vector<double> predict_power(const UwgnnModel& model, const NetworkInstance& inst) {
    const auto graph = sim::to_graph(inst, model.cfg.d_u, model.cfg.d_w,
                                     wmmse::full_power_v0(inst));
    return forward(model, graph, wmmse::full_power_v0(inst)).p;
}

}  // namespace d2d::gnn
