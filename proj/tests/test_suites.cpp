#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "d2d/exp/report_io.hpp"
#include "d2d/exp/suites.hpp"
#include "d2d/util/rng.hpp"
#include "d2d/wmmse/solver.hpp"

using namespace d2d;
using experiments::EvalContext;
using experiments::TestSetSpec;
using nn::Matrix;

namespace {

EvalContext ctx_with(std::uint64_t seed, int threads = 1) {
    EvalContext ctx;
    ctx.config = {{"demo", "1"}};
    ctx.config_digest = "deadbeefdeadbeef";
    ctx.seed = seed;
    ctx.threads = threads;
    return ctx;
}

// Spearman rank correlation; average ranks are unnecessary here because the
// inputs are distinct in practice.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    auto ranks = [n](const std::vector<double>& v) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return v[a] < v[b];
        });
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[idx[i]] = static_cast<double>(i);
        return r;
    };
    const auto rx = ranks(xs);
    const auto ry = ranks(ys);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
    const double nn_ = static_cast<double>(n);
    return 1.0 - 6.0 * d2 / (nn_ * (nn_ * nn_ - 1.0));
}

}  // namespace

TEST_CASE("corr metric: duplicated and negated columns correlate fully") {
    Rng rng(3);
    Matrix x(64, 2);
    for (std::size_t r = 0; r < 64; ++r) {
        x(r, 0) = rng.uniform(-1.0, 1.0);
        x(r, 1) = x(r, 0);
    }
    CHECK(experiments::corr_metric(x) == 1.0);  // exact

    Matrix y(64, 2);
    for (std::size_t r = 0; r < 64; ++r) {
        y(r, 0) = rng.uniform(-1.0, 1.0);
        y(r, 1) = -y(r, 0);
    }
    CHECK(experiments::corr_metric(y) == 1.0);
}

TEST_CASE("corr metric: independent columns decorrelate") {
    Rng rng(5);
    Matrix x(10000, 2);
    for (std::size_t r = 0; r < 10000; ++r) {
        x(r, 0) = rng.normal();
        x(r, 1) = rng.normal();
    }
    CHECK(std::abs(experiments::corr_metric(x)) < 0.05);
}

TEST_CASE("corr metric: exact column-permutation invariance") {
    Rng rng(7);
    Matrix x(50, 5);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-2.0, 2.0);
    const double base = experiments::corr_metric(x);

    const std::size_t perm[5] = {4, 2, 0, 3, 1};
    Matrix y(50, 5);
    for (std::size_t r = 0; r < 50; ++r) {
        for (std::size_t c = 0; c < 5; ++c) y(r, c) = x(r, perm[c]);
    }
    CHECK(experiments::corr_metric(y) == base);
}

TEST_CASE("corr metric: affine transforms and flat columns") {
    Rng rng(9);
    Matrix x(200, 3);
    for (std::size_t r = 0; r < 200; ++r) {
        x(r, 0) = rng.normal();
        x(r, 1) = rng.normal();
        x(r, 2) = 1.0;  // zero variance contributes 0
    }
    const double base = experiments::corr_metric(x);
    Matrix y = x;
    for (std::size_t r = 0; r < 200; ++r) y(r, 0) = 3.0 * y(r, 0) + 10.0;
    CHECK(experiments::corr_metric(y) == doctest::Approx(base).epsilon(1e-12));

    Matrix tiny(4, 1);
    CHECK_THROWS_AS(experiments::corr_metric(tiny), std::invalid_argument);
}

TEST_CASE("an oracle policy that replays the baseline scores exactly one") {
    const auto test_set = experiments::make_test_set({.n = 4, .count = 12}, 31);
    const experiments::PowerPolicy oracle = [](const sim::NetworkInstance& inst) {
        return wmmse::solve(inst).p;
    };
    const auto report =
        experiments::evaluate_policy("stub", oracle, test_set, 0, ctx_with(31));
    CHECK(report.summary.mean_ratio == 1.0);
    CHECK(report.summary.std_ratio == 0.0);
    for (const auto& row : report.per_instance) {
        CHECK(row.model_rate == row.wmmse_rate);
    }
}

TEST_CASE("the best-of column dominates the single run on every instance") {
    const auto test_set = experiments::make_test_set({.n = 5, .count = 10}, 33);
    const auto model = gnn::make_model(gnn::UwgnnConfig{}, 1);
    const auto report = experiments::evaluate_policy(
        "upper", experiments::model_policy(model), test_set, 5, ctx_with(33));
    for (const auto& row : report.per_instance) {
        REQUIRE(row.best_rate.has_value());
        CHECK(*row.best_rate >= row.wmmse_rate);
    }
}

TEST_CASE("fully-open topology mask reproduces the plain ratio report") {
    const auto model = gnn::make_model(gnn::UwgnnConfig{}, 2);
    TestSetSpec spec{.n = 5, .count = 8};
    const auto ctx = ctx_with(35);
    const auto plain = experiments::ratio_table(model, spec, 0, ctx);
    const auto masked = experiments::topology_suite(
        model, experiments::TopologyDirection::DenseToSparse, {-1e6}, spec, ctx);
    REQUIRE(masked.size() == 1);
    CHECK(masked[0].summary.mean_ratio == plain.summary.mean_ratio);
    CHECK(masked[0].summary.test_set_digest == plain.summary.test_set_digest);
}

TEST_CASE("shift equal to the training distribution reproduces the ratio report") {
    const auto model = gnn::make_model(gnn::UwgnnConfig{}, 3);
    TestSetSpec spec{.n = 5, .count = 8};
    const auto ctx = ctx_with(37);
    const auto plain = experiments::ratio_table(model, spec, 0, ctx);
    const auto shifted = experiments::distribution_shift_suite(
        model, {.family = "rayleigh", .mean = 0.0, .std = 1.0}, spec, ctx);
    CHECK(shifted.summary.mean_ratio == plain.summary.mean_ratio);
    CHECK(shifted.summary.test_set_digest == plain.summary.test_set_digest);

    CHECK_THROWS_AS(experiments::distribution_shift_suite(
                        model, {.family = "nakagami"}, spec, ctx),
                    std::invalid_argument);
}

TEST_CASE("rician shift family runs end to end with finite ratios") {
    const auto model = gnn::make_model(gnn::UwgnnConfig{}, 4);
    const auto report = experiments::distribution_shift_suite(
        model, {.family = "rician", .std = 1.0, .los_strength = 1.0},
        {.n = 5, .count = 6}, ctx_with(39));
    CHECK(report.summary.count == 6);
    CHECK(std::isfinite(report.summary.mean_ratio));
    CHECK(report.summary.mean_ratio > 0.0);
}

TEST_CASE("zero-speed mobility gives a flat curve") {
    const auto model = gnn::make_model(gnn::UwgnnConfig{}, 5);
    const auto curves = experiments::mobility_suite(model, {0.0}, 4, 6,
                                                    {.n = 5, .count = 6}, ctx_with(41));
    REQUIRE(curves.size() == 1);
    REQUIRE(curves[0].steps.size() == 5);
    for (const auto& st : curves[0].steps) {
        CHECK(st.mean_ratio == curves[0].steps[0].mean_ratio);
    }
}

TEST_CASE("faster movement never preserves more edges at the horizon") {
    const auto model = gnn::make_model(gnn::UwgnnConfig{}, 6);
    const auto curves = experiments::mobility_suite(
        model, {0.0, 50.0, 150.0, 400.0}, 5, 10, {.n = 6, .count = 10}, ctx_with(43));
    REQUIRE(curves.size() == 4);
    for (std::size_t i = 1; i < curves.size(); ++i) {
        CHECK(curves[i].surviving_edges <= curves[i - 1].surviving_edges);
    }
}

TEST_CASE("scalability reports share the digest and differ in size") {
    const auto model = gnn::make_model(gnn::UwgnnConfig{}, 7);
    const auto reports = experiments::scalability_suite(model, {3, 7}, 5,
                                                        {.n = 5, .count = 5},
                                                        ctx_with(45));
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].summary.n_users == 3);
    CHECK(reports[1].summary.n_users == 7);
    CHECK(reports[0].summary.config_digest == reports[1].summary.config_digest);
}

TEST_CASE("sample complexity improves with data and reuses the test set") {
    gnn::UwgnnConfig cfg;
    gnn::TrainOptions topts;
    topts.epochs = 6;
    topts.batch_size = 32;
    topts.seed = 47;
    topts.tracking_count = 0;

    std::vector<sim::NetworkInstance> master(768);
    for (std::size_t i = 0; i < master.size(); ++i) {
        master[i] = sim::generate_rayleigh(6, 0.0, 1.0, derive_seed(47, "train", i));
    }
    const auto test_set = experiments::make_test_set({.n = 6, .count = 128}, 49);

    const std::vector<std::size_t> sizes = {48, 192, 768};
    std::vector<double> mean_ratios;
    std::string digest;
    for (int repeat = 0; repeat < 3; ++repeat) {
        gnn::TrainOptions t = topts;
        t.seed = topts.seed + static_cast<std::uint64_t>(repeat);
        const auto reports = experiments::sample_complexity_suite(
            cfg, t, master, sizes, test_set, ctx_with(51));
        for (std::size_t i = 0; i < reports.size(); ++i) {
            if (repeat == 0) {
                mean_ratios.push_back(reports[i].summary.mean_ratio);
            } else {
                mean_ratios[i] += reports[i].summary.mean_ratio;
            }
            if (digest.empty()) digest = reports[i].summary.test_set_digest;
            CHECK(reports[i].summary.test_set_digest == digest);
            CHECK(std::isfinite(reports[i].summary.mean_ratio));
        }
    }
    const std::vector<double> xs = {48.0, 192.0, 768.0};
    CHECK(spearman(xs, mean_ratios) > 0.0);
}

TEST_CASE("report files carry the digest and reproduce bit-exactly") {
    const auto model = gnn::make_model(gnn::UwgnnConfig{}, 8);
    TestSetSpec spec{.n = 4, .count = 6};
    const auto ctx = ctx_with(53);
    const auto r1 = experiments::ratio_table(model, spec, 2, ctx);
    const auto r2 = experiments::ratio_table(model, spec, 2, ctx);
    CHECK(experiments::report_csv(r1) == experiments::report_csv(r2));
    CHECK(experiments::report_json(r1, ctx) == experiments::report_json(r2, ctx));
    CHECK(experiments::report_csv(r1).find("# config_digest=deadbeefdeadbeef") == 0);
    const auto json = experiments::report_json(r1, ctx);
    CHECK(json.find("\"demo\": \"1\"") != std::string::npos);
}
