#include "d2d/gnn/train.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "d2d/kern/kernels.hpp"
#include "d2d/nn/adam.hpp"
#include "d2d/util/parallel.hpp"
#include "d2d/util/rng.hpp"
#include "d2d/wmmse/solver.hpp"

namespace d2d::gnn {

namespace {

struct InstanceGrad {
    nn::ParamSet grads;
    double loss = 0.0;
};

void instance_loss_grad(const UwgnnModel& model, const NetworkInstance& inst,
                        InstanceGrad& out) {
    const auto v0 = wmmse::full_power_v0(inst);
    const auto graph = sim::to_graph(inst, model.cfg.d_u, model.cfg.d_w, v0);
    auto trace = forward(model, graph, v0, /*with_tapes=*/true);
    out.loss = loss(inst, trace.p);
    const auto dp = loss_grad_p(inst, trace.p);
    backward(model, graph, trace, dp, out.grads);
}

}  // namespace

double mean_ratio(const UwgnnModel& model, const std::vector<NetworkInstance>& set,
                  const std::vector<double>& baseline_rates, int threads) {
    std::vector<double> ratios(set.size(), 0.0);
    parallel_for(set.size(), threads, [&](std::size_t i) {
        const double rate = wmmse::sum_rate(set[i], predict_power(model, set[i]));
        ratios[i] = baseline_rates[i] > 0.0 ? rate / baseline_rates[i] : 1.0;
    });
    return ratios.empty()
               ? 0.0
               : kern::sum(ratios.data(), ratios.size()) / static_cast<double>(ratios.size());
}

TrainResult train(const UwgnnConfig& cfg, const std::vector<NetworkInstance>& dataset,
                  const TrainOptions& opts) {
    return train_from(make_model(cfg, derive_seed(opts.seed, "init")), dataset, opts);
}

TrainResult train_from(UwgnnModel start, const std::vector<NetworkInstance>& dataset,
                       const TrainOptions& opts) {
    if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");
    if (opts.batch_size == 0) throw std::invalid_argument("train: batch_size must be >= 1");

    TrainResult result;
    result.model = std::move(start);
    UwgnnModel& model = result.model;

    nn::Adam adam(model.params, opts.lr);

    // Frozen tracking subset: leading instances, baseline solved once.
    const std::size_t n_track = std::min(opts.tracking_count, dataset.size());
    std::vector<NetworkInstance> tracking(dataset.begin(),
                                          dataset.begin() + static_cast<long>(n_track));
    std::vector<double> tracking_base(n_track, 0.0);
    parallel_for(n_track, opts.threads, [&](std::size_t i) {
        const auto res = wmmse::solve(tracking[i]);
        tracking_base[i] = wmmse::sum_rate(tracking[i], res.p);
    });

    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    std::vector<InstanceGrad> slots(opts.batch_size);

    for (std::size_t epoch = 1; epoch <= opts.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(opts.seed, "shuffle", epoch));
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[shuffle_rng.index(i)]);
        }

        double epoch_loss = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
            const std::size_t bsz = std::min(opts.batch_size, order.size() - start);
            parallel_for(bsz, opts.threads, [&](std::size_t b) {
                slots[b].grads = nn::zeros_like(model.params);
                instance_loss_grad(model, dataset[order[start + b]], slots[b]);
            });

            nn::ParamSet batch_grads = nn::zeros_like(model.params);
            double batch_loss = 0.0;
            const double inv = 1.0 / static_cast<double>(bsz);
            for (std::size_t b = 0; b < bsz; ++b) {  // fixed reduction order
                batch_loss += slots[b].loss;
                for (std::size_t t = 0; t < batch_grads.size(); ++t) {
                    kern::axpy(batch_grads[t].values.data(), inv,
                               slots[b].grads[t].values.data(),
                               batch_grads[t].values.size());
                }
            }
            batch_loss *= inv;
            if (!std::isfinite(batch_loss)) {
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch " +
                                         std::to_string(batch_index));
            }
            adam.step(model.params, batch_grads);
            epoch_loss += batch_loss * static_cast<double>(bsz);
            ++batch_index;
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_loss / static_cast<double>(dataset.size());
        std::vector<double> track_loss(n_track, 0.0);
        std::vector<double> track_ratio(n_track, 0.0);
        parallel_for(n_track, opts.threads, [&](std::size_t i) {
            const auto p = predict_power(model, tracking[i]);
            const double rate = wmmse::sum_rate(tracking[i], p);
            track_loss[i] = -rate;
            track_ratio[i] = tracking_base[i] > 0.0 ? rate / tracking_base[i] : 1.0;
        });
        if (n_track > 0) {
            stats.val_loss = kern::sum(track_loss.data(), n_track) /
                             static_cast<double>(n_track);
            stats.val_ratio = kern::sum(track_ratio.data(), n_track) /
                              static_cast<double>(n_track);
        }
        result.curve.push_back(stats);
    }
    return result;
}

}  // namespace d2d::gnn
