#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "d2d/gnn/train.hpp"
#include "d2d/gnn/uwgnn.hpp"
#include "d2d/nn/tensor.hpp"
#include "d2d/sim/network.hpp"

namespace d2d::experiments {

using gnn::UwgnnModel;
using nn::Matrix;
using sim::NetworkInstance;

struct InstanceResult {
    std::size_t id = 0;
    double model_rate = 0.0;
    double wmmse_rate = 0.0;
    std::optional<double> best_rate;  // best-of-restarts upper bound
};

struct ReportSummary {
    double mean_ratio = 0.0;
    double std_ratio = 0.0;
    std::size_t n_users = 0;
    std::size_t count = 0;
    std::string config_digest;
    std::string checkpoint_digest;
    std::string test_set_digest;
    std::uint64_t seed = 0;
};

struct ExperimentReport {
    std::string name;
    std::vector<InstanceResult> per_instance;
    ReportSummary summary;
};

// Anything that maps an instance to a feasible power vector.
using PowerPolicy = std::function<std::vector<double>(const NetworkInstance&)>;

PowerPolicy model_policy(const UwgnnModel& model);

// Shared run context: the canonical config map stamped into every report.
struct EvalContext {
    std::map<std::string, std::string> config;
    std::string config_digest;
    std::string checkpoint_digest;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct TestSetSpec {
    std::size_t n = 10;
    std::size_t count = 2000;
    double mean = 0.0;
    double std = 1.0;
    sim::ChannelOptions channel;
};

// Independent per-instance substreams; set(count=a) is a prefix of
// set(count=b) for a < b under the same seed.
std::vector<NetworkInstance> make_test_set(const TestSetSpec& spec, std::uint64_t seed);

// Per-instance model rate vs single-run baseline (full-power start,
// 100 rounds); optional best-of-restarts column.
ExperimentReport evaluate_policy(const std::string& name, const PowerPolicy& policy,
                                 const std::vector<NetworkInstance>& test_set,
                                 std::size_t restarts_for_upper, const EvalContext& ctx);

ExperimentReport ratio_table(const UwgnnModel& model, const TestSetSpec& spec,
                             std::size_t restarts_for_upper, const EvalContext& ctx);

// Fixed checkpoint evaluated at each user count, no retraining.
std::vector<ExperimentReport> scalability_suite(const UwgnnModel& model,
                                                const std::vector<std::size_t>& sizes,
                                                std::size_t count_per_size,
                                                const TestSetSpec& base,
                                                const EvalContext& ctx);

struct ShiftSpec {
    std::string family = "rayleigh";  // rayleigh | rician
    double mean = 0.0;
    double std = 1.0;
    double los_strength = 1.0;  // component mean when family == rician
};

ExperimentReport distribution_shift_suite(const UwgnnModel& model, const ShiftSpec& shift,
                                          const TestSetSpec& base, const EvalContext& ctx);

enum class TopologyDirection { DenseToSparse, SparseToDense };

// Base test set masked at each eta with common random numbers across the
// grid (same per-instance mask stream).
std::vector<ExperimentReport> topology_suite(const UwgnnModel& model,
                                             TopologyDirection direction,
                                             const std::vector<double>& eta_grid,
                                             const TestSetSpec& base,
                                             const EvalContext& ctx);

struct MobilityStep {
    std::size_t step = 0;  // 0 is the initial placement
    double mean_ratio = 0.0;
    double std_ratio = 0.0;
};

struct MobilityCurve {
    double speed = 0.0;
    std::vector<MobilityStep> steps;
    // off-diagonal live-edge count at the end of the horizon, summed over
    // instances (geometry oracle hook)
    std::size_t surviving_edges = 0;
};

std::vector<MobilityCurve> mobility_suite(const UwgnnModel& model,
                                          const std::vector<double>& speeds,
                                          std::size_t horizon, std::size_t count,
                                          const TestSetSpec& base,
                                          const EvalContext& ctx);

// Fresh model per training-set size (identical seeds elsewhere); the master
// training set is sliced by prefix, the test set is reused verbatim.
std::vector<ExperimentReport> sample_complexity_suite(
    const gnn::UwgnnConfig& cfg, const gnn::TrainOptions& topts,
    const std::vector<NetworkInstance>& master_train,
    const std::vector<std::size_t>& train_sizes,
    const std::vector<NetworkInstance>& test_set, const EvalContext& ctx);

// Mean absolute pairwise Pearson correlation across columns, in [0, 1].
// Zero-variance columns contribute 0; d < 2 is an error.
double corr_metric(const Matrix& x);

}  // namespace d2d::experiments
