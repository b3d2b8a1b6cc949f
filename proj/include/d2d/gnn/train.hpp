#pragma once

#include <cstdint>
#include <vector>

#include "d2d/gnn/uwgnn.hpp"

namespace d2d::gnn {

struct TrainOptions {
    std::size_t epochs = 30;
    std::size_t batch_size = 64;
    double lr = 1e-3;
    std::uint64_t seed = 1;
    int threads = 1;
    // Frozen subset used only for per-epoch tracking; its single-run
    // baseline rates are solved once up front.
    std::size_t tracking_count = 200;
};

struct EpochStats {
    std::size_t epoch = 0;     // 1-based
    double train_loss = 0.0;   // mean instance loss over the epoch
    double val_ratio = 0.0;    // mean model/baseline rate on the tracking set
    double val_loss = 0.0;
};

struct TrainResult {
    UwgnnModel model;
    std::vector<EpochStats> curve;
};

// Minibatch Adam on the mean negative sum rate. Deterministic for a given
// (config, dataset, options): shuffling, init and gradient reduction all run
// in fixed order regardless of thread count. Throws on non-finite loss,
// naming epoch and batch.
TrainResult train(const UwgnnConfig& cfg, const std::vector<NetworkInstance>& dataset,
                  const TrainOptions& opts);

// Same loop from an explicit starting model (resume or custom init).
TrainResult train_from(UwgnnModel start, const std::vector<NetworkInstance>& dataset,
                       const TrainOptions& opts);

// Mean model-vs-baseline sum-rate ratio over a set (baseline rates given).
double mean_ratio(const UwgnnModel& model, const std::vector<NetworkInstance>& set,
                  const std::vector<double>& baseline_rates, int threads = 1);

}  // namespace d2d::gnn
