// d2dpower: dataset generation, WMMSE baselines, unsupervised training and
// the evaluation suites for D2D power allocation, behind one CLI.

#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "d2d/cli/config.hpp"
#include "d2d/exp/report_io.hpp"
#include "d2d/exp/suites.hpp"
#include "d2d/gnn/train.hpp"
#include "d2d/nn/checkpoint.hpp"
#include "d2d/sim/dataset.hpp"
#include "d2d/util/fs.hpp"
#include "d2d/util/parallel.hpp"
#include "d2d/util/rng.hpp"
#include "d2d/wmmse/solver.hpp"

namespace {

using namespace d2d;
using cli::RunConfig;

std::vector<sim::NetworkInstance> generate_instances(const RunConfig& cfg) {
    std::vector<sim::NetworkInstance> out(cfg.count);
    const auto opts = cfg.channel_options();
    parallel_for(cfg.count, cfg.threads, [&](std::size_t i) {
        auto inst = sim::generate_channel(cfg.n_users, cfg.chan_mean, cfg.chan_std,
                                          derive_seed(cfg.seed, "instance", i), opts);
        if (cfg.mask) {
            inst = sim::mask_topology(inst, cfg.mask_eta,
                                      derive_seed(cfg.seed, "mask", i));
        }
        out[i] = std::move(inst);
    });
    return out;
}

int cmd_generate(const RunConfig& cfg) {
    if (cfg.out_path.empty()) throw std::runtime_error("generate: --out is required");
    const auto samples = generate_instances(cfg);
    sim::DatasetHeader header;
    header.seed = cfg.seed;
    header.config_digest = cfg.digest();
    sim::save_dataset(samples, header, cfg.out_path);
    std::cout << "wrote " << samples.size() << " instances to " << cfg.out_path
              << " (config " << cfg.digest() << ")\n";
    return 0;
}

int cmd_baseline(const RunConfig& cfg) {
    if (cfg.dataset_path.empty()) throw std::runtime_error("baseline: --dataset is required");
    if (cfg.out_path.empty()) throw std::runtime_error("baseline: --out is required");
    const auto data = sim::load_dataset(cfg.dataset_path);

    struct Row {
        double single = 0.0;
        double best = 0.0;
    };
    std::vector<Row> rows(data.samples.size());
    parallel_for(data.samples.size(), cfg.threads, [&](std::size_t i) {
        const auto& inst = data.samples[i];
        rows[i].single = wmmse::sum_rate(inst, wmmse::solve(inst).p);
        rows[i].best = wmmse::solve_best_of(inst, std::max<std::size_t>(cfg.restarts, 1),
                                            derive_seed(cfg.seed, "restart", i))
                           .rate;
    });

    std::ostringstream csv;
    csv << "# config_digest=" << cfg.digest() << "\n";
    csv << "instance,single_rate,best_rate\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        csv << i << ',' << experiments::format_double(rows[i].single) << ','
            << experiments::format_double(rows[i].best) << "\n";
    }
    atomic_write(cfg.out_path, csv.str());
    std::cout << "wrote baseline rates for " << rows.size() << " instances to "
              << cfg.out_path << "\n";
    return 0;
}

nn::CheckpointMeta model_meta(const RunConfig& cfg, std::size_t epoch) {
    nn::CheckpointMeta meta;
    meta["seed"] = std::to_string(cfg.seed);
    meta["config_digest"] = cfg.digest();
    meta["epoch"] = std::to_string(epoch);
    meta["layers"] = std::to_string(cfg.layers);
    meta["d_u"] = std::to_string(cfg.d_u);
    meta["d_w"] = std::to_string(cfg.d_w);
    meta["d_msg"] = std::to_string(cfg.d_msg);
    meta["hidden_width"] = std::to_string(cfg.hidden_width);
    meta["mlp_mode"] = cfg.mlp_mode;
    meta["share_parameters"] = cfg.share_parameters ? "1" : "0";
    return meta;
}

gnn::UwgnnConfig config_from_meta(const nn::CheckpointMeta& meta) {
    gnn::UwgnnConfig cfg;
    cfg.layers = std::stoul(meta.at("layers"));
    cfg.d_u = std::stoul(meta.at("d_u"));
    cfg.d_w = std::stoul(meta.at("d_w"));
    cfg.d_msg = std::stoul(meta.at("d_msg"));
    cfg.hidden_width = std::stoul(meta.at("hidden_width"));
    cfg.mlp_mode = meta.at("mlp_mode") == "paper" ? gnn::MlpMode::PaperTriples
                                                  : gnn::MlpMode::Equation;
    cfg.share_parameters = meta.at("share_parameters") == "1";
    return cfg;
}

int cmd_train(const RunConfig& cfg) {
    if (cfg.dataset_path.empty()) throw std::runtime_error("train: --dataset is required");
    if (cfg.out_path.empty()) throw std::runtime_error("train: --out is required");
    const auto data = sim::load_dataset(cfg.dataset_path);

    gnn::TrainOptions topts;
    topts.epochs = cfg.epochs;
    topts.batch_size = cfg.batch_size;
    topts.lr = cfg.lr;
    topts.seed = cfg.seed;
    topts.threads = cfg.threads;
    const auto result = gnn::train(cfg.model_config(), data.samples, topts);

    nn::save_params(result.model.params, model_meta(cfg, cfg.epochs), cfg.out_path);

    std::ostringstream curve;
    curve << "# config_digest=" << cfg.digest() << "\n";
    curve << "epoch,train_loss,val_ratio\n";
    for (const auto& row : result.curve) {
        curve << row.epoch << ',' << experiments::format_double(row.train_loss) << ','
              << experiments::format_double(row.val_ratio) << "\n";
    }
    atomic_write(cfg.out_path + ".curve.csv", curve.str());

    std::cout << "trained " << cfg.epochs << " epochs on " << data.samples.size()
              << " instances; checkpoint " << cfg.out_path << " ("
              << nn::param_count(result.model.params) << " parameters)\n";
    return 0;
}

experiments::EvalContext make_context(const RunConfig& cfg,
                                      const std::string& checkpoint_digest) {
    experiments::EvalContext ctx;
    ctx.config = cfg.canonical_map();
    ctx.config_digest = cfg.digest();
    ctx.checkpoint_digest = checkpoint_digest;
    ctx.seed = cfg.seed;
    ctx.threads = cfg.threads;
    return ctx;
}

int cmd_eval(const RunConfig& cfg) {
    static const char* kSuites[] = {"ratio", "scalability", "shift",
                                    "topology", "mobility", "complexity"};
    bool known = false;
    for (const char* s : kSuites) known = known || cfg.suite == s;
    if (!known) {
        std::ostringstream msg;
        msg << "eval: unknown suite '" << cfg.suite << "'; available:";
        for (const char* s : kSuites) msg << ' ' << s;
        throw CLI::ValidationError(msg.str());
    }
    if (cfg.checkpoint_path.empty()) throw std::runtime_error("eval: --checkpoint is required");
    if (cfg.out_path.empty()) throw std::runtime_error("eval: --out is required");

    const auto ckpt = nn::load_params(cfg.checkpoint_path);
    const auto model = gnn::model_from_params(config_from_meta(ckpt.meta), ckpt.params);
    const auto ctx = make_context(cfg, ckpt.meta.count("config_digest")
                                           ? ckpt.meta.at("config_digest")
                                           : "");

    experiments::TestSetSpec base;
    base.n = cfg.n_users;
    base.count = cfg.eval_count;
    base.mean = cfg.chan_mean;
    base.std = cfg.chan_std;
    base.channel = cfg.channel_options();

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_path);
    const auto path = [&](const std::string& leaf) {
        return (fs::path(cfg.out_path) / leaf).string();
    };
    const auto emit = [&](const experiments::ExperimentReport& report,
                          const std::string& stem) {
        experiments::write_report(report, ctx, path(stem + ".csv"), path(stem + ".json"));
        std::cout << stem << ": mean ratio " << report.summary.mean_ratio << " over "
                  << report.summary.count << " instances\n";
    };

    if (cfg.suite == "ratio") {
        emit(experiments::ratio_table(model, base, cfg.best_restarts, ctx), "ratio");
    } else if (cfg.suite == "scalability") {
        const auto reports =
            experiments::scalability_suite(model, cfg.sizes, cfg.eval_count, base, ctx);
        for (std::size_t i = 0; i < reports.size(); ++i) {
            emit(reports[i], "scalability_n" + std::to_string(cfg.sizes[i]));
        }
    } else if (cfg.suite == "shift") {
        experiments::ShiftSpec shift;
        shift.family = cfg.shift_family;
        shift.mean = cfg.shift_mean;
        shift.std = cfg.shift_std;
        shift.los_strength = cfg.los_strength;
        emit(experiments::distribution_shift_suite(model, shift, base, ctx), "shift");
    } else if (cfg.suite == "topology") {
        const auto direction = cfg.direction == "sparse_to_dense"
                                   ? experiments::TopologyDirection::SparseToDense
                                   : experiments::TopologyDirection::DenseToSparse;
        const auto reports =
            experiments::topology_suite(model, direction, cfg.eta_grid, base, ctx);
        std::vector<experiments::CurveRow> curve;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            emit(reports[i], "topology_eta" + std::to_string(i));
            curve.push_back({cfg.eta_grid[i], reports[i].summary.mean_ratio,
                             reports[i].summary.std_ratio});
        }
        atomic_write(path("topology_curve.csv"),
                     experiments::curve_csv("eta", curve, cfg.digest()));
    } else if (cfg.suite == "mobility") {
        const auto curves = experiments::mobility_suite(model, cfg.speeds, cfg.horizon,
                                                        cfg.eval_count, base, ctx);
        for (const auto& c : curves) {
            std::vector<experiments::CurveRow> rows;
            for (const auto& st : c.steps) {
                rows.push_back({static_cast<double>(st.step), st.mean_ratio,
                                st.std_ratio});
            }
            atomic_write(path("mobility_s" + experiments::format_double(c.speed) + ".csv"),
                         experiments::curve_csv("step", rows, cfg.digest()));
            std::cout << "mobility speed " << c.speed << ": final ratio "
                      << c.steps.back().mean_ratio << "\n";
        }
    } else {  // complexity
        if (cfg.dataset_path.empty()) {
            throw std::runtime_error("eval complexity: --dataset is required");
        }
        const auto master = sim::load_dataset(cfg.dataset_path);
        const auto test_set =
            experiments::make_test_set(base, derive_seed(cfg.seed, "testset"));
        gnn::TrainOptions topts;
        topts.epochs = cfg.epochs;
        topts.batch_size = cfg.batch_size;
        topts.lr = cfg.lr;
        topts.seed = cfg.seed;
        topts.threads = cfg.threads;
        const auto reports = experiments::sample_complexity_suite(
            model.cfg, topts, master.samples, cfg.train_sizes, test_set, ctx);
        std::vector<experiments::CurveRow> curve;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            emit(reports[i], "complexity_" + std::to_string(cfg.train_sizes[i]));
            curve.push_back({static_cast<double>(cfg.train_sizes[i]),
                             reports[i].summary.mean_ratio,
                             reports[i].summary.std_ratio});
        }
        atomic_write(path("complexity_curve.csv"),
                     experiments::curve_csv("train_size", curve, cfg.digest()));
    }
    return 0;
}

void add_common_options(CLI::App* app, RunConfig& cfg, std::string& config_path) {
    app->add_option("--config", config_path,
                    "flat key=value config file; explicit flags take precedence");
    app->add_option("--seed", cfg.seed, "master seed; all randomness derives from it");
    app->add_option("--threads", cfg.threads, "worker threads (results are thread-count invariant)");
    app->add_option("--noise-db,--noise_db", cfg.noise_db, "noise power in dB (linear sigma2 = 10^(dB/10))");
    app->add_option("--p-max,--p_max", cfg.p_max, "transmit power cap");
    app->add_option("--out", cfg.out_path, "output path");
}

void add_model_options(CLI::App* app, RunConfig& cfg) {
    app->add_option("--layers", cfg.layers, "unrolled layer count");
    app->add_option("--d-u,--d_u", cfg.d_u, "equalizer feature width");
    app->add_option("--d-w,--d_w", cfg.d_w, "weight feature width");
    app->add_option("--d-msg,--d_msg", cfg.d_msg, "message width");
    app->add_option("--hidden-width,--hidden_width", cfg.hidden_width, "mlp hidden width");
    app->add_option("--mlp-mode,--mlp_mode", cfg.mlp_mode, "equation | paper input widths");
    app->add_flag("--share-parameters,--share_parameters,!--no-share-parameters",
                  cfg.share_parameters, "layer 1 own group, layers 2..K shared");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"D2D power allocation workbench: WMMSE baselines and an "
                 "unrolled-WMMSE graph network"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string config_path;

    // Config file values load first so explicit flags override them.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                cli::load_config_file(cfg, argv[i + 1]);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            }
        }
    }

    CLI::App* gen = app.add_subcommand("generate", "sample interference networks to a dataset file");
    add_common_options(gen, cfg, config_path);
    gen->add_option("--n,--n-users,--n_users", cfg.n_users, "transceiver pairs per instance");
    gen->add_option("--count", cfg.count, "number of instances");
    gen->add_option("--chan-mean,--chan_mean", cfg.chan_mean, "per-component channel mean (LOS strength)");
    gen->add_option("--chan-std,--chan_std", cfg.chan_std, "per-component channel std");
    gen->add_flag("--weighted", cfg.weighted, "draw rate weights from U(0,1)");
    gen->add_flag("--mask", cfg.mask, "apply topology masking");
    gen->add_option("--mask-eta,--mask_eta", cfg.mask_eta, "loss-of-connection threshold");

    CLI::App* base = app.add_subcommand("baseline", "single-run and best-of-restarts solver rates");
    add_common_options(base, cfg, config_path);
    base->add_option("--dataset", cfg.dataset_path, "input dataset file")->required();
    base->add_option("--restarts", cfg.restarts, "restarts for the best-of column");

    CLI::App* train = app.add_subcommand("train", "unsupervised training on a dataset");
    add_common_options(train, cfg, config_path);
    add_model_options(train, cfg);
    train->add_option("--dataset", cfg.dataset_path, "training dataset file")->required();
    train->add_option("--lr", cfg.lr, "Adam learning rate");
    train->add_option("--batch,--batch_size", cfg.batch_size, "minibatch size");
    train->add_option("--epochs", cfg.epochs, "training epochs");

    CLI::App* eval = app.add_subcommand("eval", "evaluation suites against the solver baseline");
    add_common_options(eval, cfg, config_path);
    eval->add_option("--checkpoint", cfg.checkpoint_path, "trained model checkpoint");
    eval->add_option("--suite", cfg.suite,
                     "ratio | scalability | shift | topology | mobility | complexity");
    eval->add_option("--n,--n-users,--n_users", cfg.n_users, "users per test instance");
    eval->add_option("--eval-count,--eval_count", cfg.eval_count, "test instances per report");
    eval->add_option("--best-restarts,--best_restarts", cfg.best_restarts,
                     "best-of-restarts upper-bound column (ratio suite)");
    eval->add_option("--chan-mean,--chan_mean", cfg.chan_mean, "test channel mean");
    eval->add_option("--chan-std,--chan_std", cfg.chan_std, "test channel std");
    eval->add_option("--sizes", [&cfg](const std::vector<std::string>& v) {
        cfg.sizes = cli::parse_sizes(v.back());
        return true;
    }, "comma-separated user counts (scalability)");
    eval->add_option("--eta-grid,--eta_grid", [&cfg](const std::vector<std::string>& v) {
        cfg.eta_grid = cli::parse_doubles(v.back());
        return true;
    }, "comma-separated masking thresholds (topology)");
    eval->add_option("--direction", cfg.direction, "dense_to_sparse | sparse_to_dense");
    eval->add_option("--shift-family,--shift_family", cfg.shift_family, "rayleigh | rician");
    eval->add_option("--shift-mean,--shift_mean", cfg.shift_mean, "shifted channel mean");
    eval->add_option("--shift-std,--shift_std", cfg.shift_std, "shifted channel std");
    eval->add_option("--los,--los_strength", cfg.los_strength, "LOS strength for rician shifts");
    eval->add_option("--speeds", [&cfg](const std::vector<std::string>& v) {
        cfg.speeds = cli::parse_doubles(v.back());
        return true;
    }, "comma-separated speeds in m/step (mobility)");
    eval->add_option("--horizon", cfg.horizon, "mobility steps");
    eval->add_option("--train-sizes,--train_sizes", [&cfg](const std::vector<std::string>& v) {
        cfg.train_sizes = cli::parse_sizes(v.back());
        return true;
    }, "comma-separated training-set sizes (complexity)");
    eval->add_option("--dataset", cfg.dataset_path, "master training set (complexity)");
    eval->add_option("--epochs", cfg.epochs, "training epochs (complexity)");
    eval->add_option("--batch,--batch_size", cfg.batch_size, "minibatch size (complexity)");
    eval->add_option("--lr", cfg.lr, "learning rate (complexity)");

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_generate(cfg);
        if (base->parsed()) return cmd_baseline(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (eval->parsed()) return cmd_eval(cfg);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
