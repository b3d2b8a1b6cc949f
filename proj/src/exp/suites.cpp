#include "d2d/exp/suites.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "d2d/sim/dataset.hpp"
#include "d2d/util/parallel.hpp"
#include "d2d/util/rng.hpp"
#include "d2d/wmmse/solver.hpp"

namespace d2d::experiments {

PowerPolicy model_policy(const UwgnnModel& model) {
    return [&model](const NetworkInstance& inst) {
        return gnn::predict_power(model, inst);
    };
}

std::vector<NetworkInstance> make_test_set(const TestSetSpec& spec, std::uint64_t seed) {
    std::vector<NetworkInstance> out(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        out[i] = sim::generate_channel(spec.n, spec.mean, spec.std,
                                       derive_seed(seed, "instance", i), spec.channel);
    }
    return out;
}

namespace {

void finalize_summary(ExperimentReport& report, const EvalContext& ctx) {
    double sum = 0.0;
    double sumsq = 0.0;
    std::size_t m = 0;
    for (const auto& r : report.per_instance) {
        if (r.wmmse_rate > 0.0) {
            const double ratio = r.model_rate / r.wmmse_rate;
            sum += ratio;
            sumsq += ratio * ratio;
            ++m;
        }
    }
    if (m > 0) {
        report.summary.mean_ratio = sum / static_cast<double>(m);
        if (m > 1) {
            const double var =
                (sumsq - sum * sum / static_cast<double>(m)) / static_cast<double>(m - 1);
            report.summary.std_ratio = var > 0.0 ? std::sqrt(var) : 0.0;
        }
    }
    report.summary.count = report.per_instance.size();
    report.summary.config_digest = ctx.config_digest;
    report.summary.checkpoint_digest = ctx.checkpoint_digest;
    report.summary.seed = ctx.seed;
}

}  // namespace

ExperimentReport evaluate_policy(const std::string& name, const PowerPolicy& policy,
                                 const std::vector<NetworkInstance>& test_set,
                                 std::size_t restarts_for_upper, const EvalContext& ctx) {
    ExperimentReport report;
    report.name = name;
    report.per_instance.resize(test_set.size());
    parallel_for(test_set.size(), ctx.threads, [&](std::size_t i) {
        const NetworkInstance& inst = test_set[i];
        InstanceResult& r = report.per_instance[i];
        r.id = i;
        r.model_rate = wmmse::sum_rate(inst, policy(inst));
        r.wmmse_rate = wmmse::sum_rate(inst, wmmse::solve(inst).p);
        if (restarts_for_upper > 0) {
            r.best_rate = wmmse::solve_best_of(inst, restarts_for_upper,
                                               derive_seed(ctx.seed, "restart", i))
                              .rate;
        }
    });
    report.summary.n_users = test_set.empty() ? 0 : test_set.front().n_users;
    report.summary.test_set_digest = sim::dataset_digest(test_set);
    finalize_summary(report, ctx);
    return report;
}

ExperimentReport ratio_table(const UwgnnModel& model, const TestSetSpec& spec,
                             std::size_t restarts_for_upper, const EvalContext& ctx) {
    const auto test_set = make_test_set(spec, derive_seed(ctx.seed, "testset"));
    return evaluate_policy("ratio", model_policy(model), test_set, restarts_for_upper,
                           ctx);
}

std::vector<ExperimentReport> scalability_suite(const UwgnnModel& model,
                                                const std::vector<std::size_t>& sizes,
                                                std::size_t count_per_size,
                                                const TestSetSpec& base,
                                                const EvalContext& ctx) {
    std::vector<ExperimentReport> reports;
    for (std::size_t n : sizes) {
        TestSetSpec spec = base;
        spec.n = n;
        spec.count = count_per_size;
        const auto test_set = make_test_set(spec, derive_seed(ctx.seed, "testset-n", n));
        reports.push_back(evaluate_policy("scalability_n" + std::to_string(n),
                                          model_policy(model), test_set, 0, ctx));
    }
    return reports;
}

ExperimentReport distribution_shift_suite(const UwgnnModel& model, const ShiftSpec& shift,
                                          const TestSetSpec& base, const EvalContext& ctx) {
    if (shift.family != "rayleigh" && shift.family != "rician") {
        throw std::invalid_argument("distribution shift: unknown family '" +
                                    shift.family + "'");
    }
    TestSetSpec spec = base;
    spec.mean = shift.family == "rician" ? shift.los_strength : shift.mean;
    spec.std = shift.std;
    const auto test_set = make_test_set(spec, derive_seed(ctx.seed, "testset"));
    return evaluate_policy("shift_" + shift.family, model_policy(model), test_set, 0,
                           ctx);
}

std::vector<ExperimentReport> topology_suite(const UwgnnModel& model,
                                             TopologyDirection direction,
                                             const std::vector<double>& eta_grid,
                                             const TestSetSpec& base,
                                             const EvalContext& ctx) {
    const auto base_set = make_test_set(base, derive_seed(ctx.seed, "testset"));
    std::vector<ExperimentReport> reports;
    for (double eta : eta_grid) {
        std::vector<NetworkInstance> masked(base_set.size());
        parallel_for(base_set.size(), ctx.threads, [&](std::size_t i) {
            masked[i] = sim::mask_topology(base_set[i], eta,
                                           derive_seed(ctx.seed, "mask", i));
        });
        const char* tag =
            direction == TopologyDirection::DenseToSparse ? "d2s" : "s2d";
        reports.push_back(evaluate_policy(
            "topology_" + std::string(tag) + "_eta" + std::to_string(eta),
            model_policy(model), masked, 0, ctx));
    }
    return reports;
}

std::vector<MobilityCurve> mobility_suite(const UwgnnModel& model,
                                          const std::vector<double>& speeds,
                                          std::size_t horizon, std::size_t count,
                                          const TestSetSpec& base,
                                          const EvalContext& ctx) {
    std::vector<MobilityCurve> curves;
    const auto policy = model_policy(model);
    for (double speed : speeds) {
        MobilityCurve curve;
        curve.speed = speed;
        std::vector<std::vector<double>> ratios(horizon + 1,
                                                std::vector<double>(count, 0.0));
        std::vector<std::size_t> live_edges(count, 0);
        parallel_for(count, ctx.threads, [&](std::size_t i) {
            auto gi = sim::make_geometric_instance(
                base.n, derive_seed(ctx.seed, "mobinit", i), base.channel, speed);
            for (std::size_t t = 0; t <= horizon; ++t) {
                if (t > 0) {
                    gi = sim::step_mobility(
                        gi.geo, gi.inst,
                        derive_seed(ctx.seed, "mobstep", i * (horizon + 1) + t));
                }
                const double model_rate = wmmse::sum_rate(gi.inst, policy(gi.inst));
                const double base_rate =
                    wmmse::sum_rate(gi.inst, wmmse::solve(gi.inst).p);
                ratios[t][i] = base_rate > 0.0 ? model_rate / base_rate : 1.0;
            }
            std::size_t live = 0;
            for (std::size_t a = 0; a < base.n; ++a) {
                for (std::size_t b = 0; b < base.n; ++b) {
                    if (a != b && gi.inst.h(a, b) != 0.0) ++live;
                }
            }
            live_edges[i] = live;
        });
        for (std::size_t t = 0; t <= horizon; ++t) {
            MobilityStep st;
            st.step = t;
            double sum = 0.0, sumsq = 0.0;
            for (double r : ratios[t]) {
                sum += r;
                sumsq += r * r;
            }
            const double m = static_cast<double>(count);
            st.mean_ratio = count > 0 ? sum / m : 0.0;
            if (count > 1) {
                const double var = (sumsq - sum * sum / m) / (m - 1.0);
                st.std_ratio = var > 0.0 ? std::sqrt(var) : 0.0;
            }
            curve.steps.push_back(st);
        }
        for (std::size_t e : live_edges) curve.surviving_edges += e;
        curves.push_back(std::move(curve));
    }
    return curves;
}

std::vector<ExperimentReport> sample_complexity_suite(
    const gnn::UwgnnConfig& cfg, const gnn::TrainOptions& topts,
    const std::vector<NetworkInstance>& master_train,
    const std::vector<std::size_t>& train_sizes,
    const std::vector<NetworkInstance>& test_set, const EvalContext& ctx) {
    std::vector<ExperimentReport> reports;
    for (std::size_t size : train_sizes) {
        if (size == 0 || size > master_train.size()) {
            throw std::invalid_argument("sample complexity: train size " +
                                        std::to_string(size) +
                                        " outside the master set");
        }
        const std::vector<NetworkInstance> slice(master_train.begin(),
                                                 master_train.begin() +
                                                     static_cast<long>(size));
        const auto trained = gnn::train(cfg, slice, topts);
        reports.push_back(evaluate_policy("samples_" + std::to_string(size),
                                          model_policy(trained.model), test_set, 0,
                                          ctx));
    }
    return reports;
}

double corr_metric(const Matrix& x) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (d < 2) throw std::invalid_argument("corr_metric: needs at least two columns");
    if (n == 0) throw std::invalid_argument("corr_metric: empty matrix");

    std::vector<double> mean(d, 0.0), ss(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += x(r, c);
        mean[c] = s / static_cast<double>(n);
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dct = x(r, c) - mean[c];
            acc += dct * dct;
        }
        ss[c] = acc;
    }

    std::vector<double> pair_corrs;
    pair_corrs.reserve(d * (d - 1) / 2);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
            if (ss[a] == 0.0 || ss[b] == 0.0) {
                pair_corrs.push_back(0.0);  // flat columns contribute 0
                continue;
            }
            double cov = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                cov += (x(r, a) - mean[a]) * (x(r, b) - mean[b]);
            }
            // sqrt of the product keeps |pearson| of duplicated columns at
            // exactly 1.0 (sqrt(s*s) == s in round-to-nearest)
            pair_corrs.push_back(std::abs(cov) / std::sqrt(ss[a] * ss[b]));
        }
    }
    // canonical summation order makes the metric exactly invariant under
    // column permutation
    std::sort(pair_corrs.begin(), pair_corrs.end());
    double total = 0.0;
    for (double c : pair_corrs) total += 2.0 * c;
    return total / (static_cast<double>(d) * static_cast<double>(d - 1));
}

}  // namespace d2d::experiments
