// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. Heavy criteria train real models; expect tens of minutes total.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "d2d/exp/suites.hpp"
#include "d2d/gnn/train.hpp"
#include "d2d/gnn/uwgnn.hpp"
#include "d2d/nn/checkpoint.hpp"
#include "d2d/sim/graph.hpp"
#include "d2d/sim/network.hpp"
#include "d2d/util/rng.hpp"
#include "d2d/wmmse/solver.hpp"

using namespace d2d;
using sim::NetworkInstance;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::function<bool(std::ostream&)> run;
};

std::vector<NetworkInstance> rayleigh_set(std::size_t count, std::size_t n,
                                          std::uint64_t seed, double std = 1.0) {
    std::vector<NetworkInstance> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = sim::generate_channel(n, 0.0, std, derive_seed(seed, "instance", i));
    }
    return out;
}

double grid_max_rate_2user(const NetworkInstance& inst, std::size_t points) {
    double best = -1.0;
    const double step = inst.p_max / static_cast<double>(points - 1);
    for (std::size_t a = 0; a < points; ++a) {
        for (std::size_t b = 0; b < points; ++b) {
            const double rate = wmmse::sum_rate(
                inst, {static_cast<double>(a) * step, static_cast<double>(b) * step});
            if (rate > best) best = rate;
        }
    }
    return best;
}

double rel_err(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-3});
    return std::abs(a - b) / scale;
}

struct RatioStats {
    double mean = 0.0;
    std::size_t count = 0;
};

RatioStats ratio_vs_wmmse(const gnn::UwgnnModel& model,
                          const std::vector<NetworkInstance>& test_set) {
    double sum = 0.0;
    std::size_t m = 0;
    for (const auto& inst : test_set) {
        const double base = wmmse::sum_rate(inst, wmmse::solve(inst).p);
        if (base <= 0.0) continue;
        const double rate = wmmse::sum_rate(inst, gnn::predict_power(model, inst));
        sum += rate / base;
        ++m;
    }
    return {m > 0 ? sum / static_cast<double>(m) : 0.0, m};
}

// Trained models, built once and reused across criteria.
struct TrainedCache {
    gnn::UwgnnModel model;
    bool ready = false;
};
TrainedCache g_cache[3];  // n = 10, 30, 20

const gnn::UwgnnModel& trained_model(std::size_t n, int slot, std::size_t count) {
    TrainedCache& cache = g_cache[slot];
    if (!cache.ready) {
        const auto train_set =
            rayleigh_set(count, n, derive_seed(2024, "train" + std::to_string(n)));
        gnn::TrainOptions opts;
        opts.epochs = 30;
        opts.batch_size = 64;
        opts.lr = 1e-3;
        opts.seed = 2024;
        opts.tracking_count = 200;
        auto result = gnn::train(gnn::UwgnnConfig{}, train_set, opts);
        cache.model = std::move(result.model);
        cache.ready = true;
        std::cout << "       (n=" << n << " model trained on " << count
                  << " instances; tracking ratio " << result.curve.back().val_ratio
                  << ")\n";
    }
    return cache.model;
}

const gnn::UwgnnModel& model_n10() { return trained_model(10, 0, 10000); }
const gnn::UwgnnModel& model_n30() { return trained_model(30, 1, 10000); }
const gnn::UwgnnModel& model_n20() { return trained_model(20, 2, 10000); }

bool c1_wmmse_vs_grid(std::ostream& log) {
    // Faithful reading: one solve per instance from the full-power start.
    // A single WMMSE run is a local method; strongly interfering draws can
    // stall at the full-power corner, which is itself a KKT point of the
    // boxed problem. The restart column is reported alongside as evidence
    // that the solver itself reaches the grid optimum.
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 2.0;
    double ratio_sum = 0.0;
    std::size_t pass_single = 0;
    std::size_t pass_restarted = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto inst =
            sim::generate_rayleigh(2, 0.0, 1.0, derive_seed(11, "grid", s));
        const double rate = wmmse::sum_rate(inst, wmmse::solve(inst).p);
        const double grid = grid_max_rate_2user(inst, 101);
        const double ratio = rate / grid;
        worst = std::min(worst, ratio);
        ratio_sum += ratio;
        if (rate >= 0.99 * grid) ++pass_single;
        if (wmmse::solve_best_of(inst, 100, derive_seed(11, "restart", s)).rate >=
            0.99 * grid) {
            ++pass_restarted;
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log << "single-run solve: " << pass_single << "/200 >= 0.99 x grid (worst "
        << worst << ", mean " << ratio_sum / 200.0 << "); best-of-100: "
        << pass_restarted << "/200; " << secs << " s";
    return pass_single == 200 && secs < 60.0;
}

bool c2_monotone_cost(std::ostream& log) {
    std::size_t unclipped = 0;
    std::size_t clipped_violations = 0;
    bool ok = true;
    for (std::uint64_t s = 0; s < 500; ++s) {
        const auto inst =
            sim::generate_rayleigh(10, 0.0, 1.0, derive_seed(13, "mono", s));
        const auto res = wmmse::solve(inst, 100, 0.0, wmmse::full_power_v0(inst));
        if (!res.state.clipped) ++unclipped;
        const auto& tr = res.state.cost_trace;
        for (std::size_t k = 1; k < tr.size(); ++k) {
            if (tr[k] > tr[k - 1] + 1e-9) {
                if (res.state.clipped) {
                    ++clipped_violations;  // outside the criterion's filter
                    break;
                }
                log << "cost increased at unclipped instance " << s << " round " << k
                    << " by " << tr[k] - tr[k - 1];
                ok = false;
            }
        }
        if (!ok) return false;
    }
    log << unclipped
        << "/500 instances unclipped and nonincreasing (1e-9); clipped instances "
           "(filtered by the criterion) also monotone except "
        << clipped_violations;
    return ok;
}

bool c3_single_user(std::ostream& log) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto inst =
            sim::generate_rayleigh(1, 0.0, 1.0, derive_seed(17, "single", s));
        const auto res = wmmse::solve(inst);
        if (res.p[0] != inst.p_max) {
            log << "instance " << s << ": p = " << res.p[0] << " != p_max";
            return false;
        }
        const double h = inst.h(0, 0);
        const double expect =
            inst.lambda[0] * std::log2(1.0 + h * h * inst.p_max / inst.sigma2);
        if (std::abs(wmmse::sum_rate(inst, res.p) - expect) > 1e-12) {
            log << "instance " << s << ": closed-form rate mismatch";
            return false;
        }
    }
    log << "100/100 instances at exact full power and closed-form rate (1e-12)";
    return true;
}

bool c4_gradient_suite(std::ostream& log) {
    const gnn::UwgnnConfig cfg;
    const auto inst = sim::generate_rayleigh(2, 0.0, 1.0, derive_seed(19, "fdinst"));
    const auto v0 = wmmse::full_power_v0(inst);
    const auto graph = sim::to_graph(inst, cfg.d_u, cfg.d_w, v0);

    double worst = 0.0;
    const double h = 1e-5;
    for (std::uint64_t point = 0; point < 100; ++point) {
        auto model = gnn::make_model(cfg, derive_seed(19, "fdpoint", point));
        auto trace = gnn::forward(model, graph, v0, /*with_tapes=*/true);
        auto grads = nn::zeros_like(model.params);
        gnn::backward(model, graph, trace, gnn::loss_grad_p(inst, trace.p), grads);

        for (std::size_t t = 0; t < model.params.size(); ++t) {
            for (std::size_t i = 0; i < model.params[t].values.size(); ++i) {
                double& x = model.params[t].values[i];
                const double saved = x;
                x = saved + h;
                const double fp = gnn::loss(inst, gnn::forward(model, graph, v0).p);
                x = saved - h;
                const double fm = gnn::loss(inst, gnn::forward(model, graph, v0).p);
                x = saved;
                const double fd = (fp - fm) / (2.0 * h);
                const double err = rel_err(fd, grads[t].values[i]);
                if (err > worst) worst = err;
                if (err >= 1e-4) {
                    log << "point " << point << " tensor " << model.params[t].name
                        << "[" << i << "]: analytic " << grads[t].values[i] << " fd "
                        << fd << " rel " << err;
                    return false;
                }
            }
        }
    }
    log << "full-loss gradients at 100 points, every coordinate rel err < 1e-4 "
        << "(worst " << worst << ")";
    return true;
}

bool c5_equivariance(std::ostream& log) {
    Rng rng(23);
    for (std::uint64_t s = 0; s < 100; ++s) {
        const gnn::UwgnnConfig cfg;
        const auto model = gnn::make_model(cfg, derive_seed(23, "eqmodel", s));
        const auto inst =
            sim::generate_rayleigh(10, 0.0, 1.0, derive_seed(23, "eqinst", s));

        std::vector<std::size_t> perm(10);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = 10; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);

        NetworkInstance permuted = inst;
        for (std::size_t i = 0; i < 10; ++i) {
            permuted.lambda[i] = inst.lambda[perm[i]];
            for (std::size_t j = 0; j < 10; ++j) {
                permuted.h(i, j) = inst.h(perm[i], perm[j]);
            }
        }
        const auto pa = gnn::predict_power(model, inst);
        const auto pb = gnn::predict_power(model, permuted);
        for (std::size_t i = 0; i < 10; ++i) {
            if (pb[i] != pa[perm[i]]) {
                log << "instance " << s << " node " << i << ": " << pb[i]
                    << " != " << pa[perm[i]] << " (bitwise)";
                return false;
            }
        }
    }
    log << "100/100 random instances commute with relabeling bitwise";
    return true;
}

bool c6_table1_band(std::ostream& log) {
    const auto test10 = rayleigh_set(2000, 10, derive_seed(2024, "test10"));
    const auto r10 = ratio_vs_wmmse(model_n10(), test10);
    // scaled-down check of the published n=30 row: a model trained at n=30
    // with the same protocol, 500 test instances, relaxed floor
    const auto test30 = rayleigh_set(500, 30, derive_seed(2024, "test30"));
    const auto r30 = ratio_vs_wmmse(model_n30(), test30);
    log << "n=10 mean ratio " << r10.mean << " over " << r10.count
        << " (band [1.00, 1.06]); n=30 trained ratio " << r30.mean
        << " (floor 0.98)";
    return r10.mean >= 1.00 && r10.mean <= 1.06 && r30.mean >= 0.98;
}

bool c7_scalability(std::ostream& log) {
    const auto& model = model_n20();
    const auto test10 = rayleigh_set(500, 10, derive_seed(2024, "scal10"));
    const auto test50 = rayleigh_set(500, 50, derive_seed(2024, "scal50"));
    const auto r10 = ratio_vs_wmmse(model, test10);
    const auto r50 = ratio_vs_wmmse(model, test50);
    log << "n=20-trained model: ratio " << r10.mean << " at n=10, " << r50.mean
        << " at n=50 (floor 0.95)";
    return r10.mean >= 0.95 && r50.mean >= 0.95;
}

bool c8_distribution_shift(std::ostream& log) {
    const auto& model = model_n10();
    const auto shifted = rayleigh_set(500, 10, derive_seed(2024, "shift"), 3.0);
    const auto r = ratio_vs_wmmse(model, shifted);
    log << "std x3 shift: mean ratio " << r.mean << " (floor 0.90)";
    return r.mean >= 0.90;
}

bool c9_topology_shift(std::ostream& log) {
    const auto& model = model_n10();
    const auto base = rayleigh_set(500, 10, derive_seed(2024, "topo"));
    std::ostringstream detail;
    bool ok = true;
    for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        std::vector<NetworkInstance> masked(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            masked[i] = sim::mask_topology(base[i], eta, derive_seed(2024, "mask", i));
        }
        const auto r = ratio_vs_wmmse(model, masked);
        detail << " eta=" << eta << ":" << r.mean;
        ok = ok && r.mean >= 0.85;
    }
    log << "dense-trained model on masked tests (floor 0.85):" << detail.str();
    return ok;
}

bool c10_param_count(std::ostream& log) {
    const auto model = gnn::make_model(gnn::UwgnnConfig{}, 1);
    const auto count = nn::param_count(model.params);
    const double lo = 1906.0 * 0.85;
    const double hi = 1906.0 * 1.15;
    log << "default configuration has " << count << " trainable scalars "
        << "(band [" << lo << ", " << hi << "])";
    return static_cast<double>(count) >= lo && static_cast<double>(count) <= hi;
}

bool c11_corr_metric(std::ostream& log) {
    Rng rng(29);
    nn::Matrix dup(256, 3);
    for (std::size_t r = 0; r < 256; ++r) {
        dup(r, 0) = rng.uniform(-1.0, 1.0);
        dup(r, 1) = dup(r, 0);
        dup(r, 2) = dup(r, 0);
    }
    if (experiments::corr_metric(dup) != 1.0) {
        log << "identical columns gave " << experiments::corr_metric(dup);
        return false;
    }

    nn::Matrix ind(10000, 2);
    for (std::size_t r = 0; r < 10000; ++r) {
        ind(r, 0) = rng.normal();
        ind(r, 1) = rng.normal();
    }
    const double c = experiments::corr_metric(ind);
    if (std::abs(c) >= 0.05) {
        log << "independent columns gave " << c;
        return false;
    }

    nn::Matrix x(64, 4);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-2.0, 2.0);
    const double base = experiments::corr_metric(x);
    const std::size_t perm[4] = {2, 0, 3, 1};
    nn::Matrix y(64, 4);
    for (std::size_t r = 0; r < 64; ++r) {
        for (std::size_t cidx = 0; cidx < 4; ++cidx) y(r, cidx) = x(r, perm[cidx]);
    }
    if (experiments::corr_metric(y) != base) {
        log << "column permutation changed the metric";
        return false;
    }
    log << "identical -> 1.0 exact; independent " << c
        << " (< 0.05); permutation invariant bitwise";
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[i + 1]);
        }
    }

    std::vector<Criterion> criteria = {
        {1, "WMMSE vs brute-force grid (2 users)", c1_wmmse_vs_grid},
        {2, "weighted sum-MSE cost monotonicity", c2_monotone_cost},
        {3, "single-user closed form", c3_single_user},
        {4, "gradient suite vs central differences", c4_gradient_suite},
        {5, "permutation equivariance (bitwise)", c5_equivariance},
        {10, "trainable parameter count", c10_param_count},
        {11, "corr metric properties", c11_corr_metric},
        {6, "sum-rate ratio band at n=10 (trained)", c6_table1_band},
        {8, "distribution shift floor", c8_distribution_shift},
        {9, "topology shift floor", c9_topology_shift},
        {7, "scalability of the n=20 model", c7_scalability},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        std::ostringstream log;
        bool ok = false;
        try {
            ok = c.run(log);
        } catch (const std::exception& e) {
            log << "exception: " << e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": "
                  << c.title << " — " << log.str() << " (" << secs << " s)\n";
        std::cout.flush();
        if (!ok) ++failures;
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
