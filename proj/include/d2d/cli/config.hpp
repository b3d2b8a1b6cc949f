#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "d2d/gnn/uwgnn.hpp"
#include "d2d/sim/network.hpp"

namespace d2d::cli {

// Every semantic knob of the workbench. Paths and thread count are carried
// alongside but excluded from the canonical form: they do not change any
// computed number.
struct RunConfig {
    // shared
    std::uint64_t seed = 1;
    double noise_db = 0.0;  // sigma2 = 10^(noise_db / 10)
    double p_max = 1.0;

    // generation
    std::size_t n_users = 10;
    std::size_t count = 10000;
    double chan_mean = 0.0;
    double chan_std = 1.0;
    bool weighted = false;
    bool mask = false;       // apply topology masking at generation
    double mask_eta = 0.0;

    // model
    std::size_t layers = 3;
    std::size_t d_u = 4;
    std::size_t d_w = 4;
    std::size_t d_msg = 16;
    std::size_t hidden_width = 8;
    std::string mlp_mode = "equation";  // equation | paper
    bool share_parameters = true;

    // training
    double lr = 1e-3;
    std::size_t batch_size = 64;
    std::size_t epochs = 30;

    // baseline
    std::size_t restarts = 8;

    // evaluation
    std::string suite = "ratio";
    std::size_t eval_count = 2000;
    std::size_t best_restarts = 0;  // best-of column in the ratio suite
    std::vector<std::size_t> sizes = {10, 50};
    std::vector<double> eta_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    std::string direction = "dense_to_sparse";
    std::string shift_family = "rayleigh";
    double shift_mean = 0.0;
    double shift_std = 1.0;
    double los_strength = 1.0;
    std::vector<double> speeds = {0.0, 50.0, 100.0};
    std::size_t horizon = 10;
    std::vector<std::size_t> train_sizes = {64, 256, 1024};

    // non-semantic
    int threads = 1;
    std::string dataset_path;
    std::string checkpoint_path;
    std::string out_path;

    double sigma2() const;
    gnn::UwgnnConfig model_config() const;  // throws on bad mlp_mode
    sim::ChannelOptions channel_options() const;

    // Key-sorted canonical form; digest of its serialization stamps outputs.
    std::map<std::string, std::string> canonical_map() const;
    std::string canonical_text() const;
    std::string digest() const;
};

std::string join_sizes(const std::vector<std::size_t>& v);
std::string join_doubles(const std::vector<double>& v);
std::vector<std::size_t> parse_sizes(const std::string& csv);
std::vector<double> parse_doubles(const std::string& csv);

// Flat key=value config file ('#' comments allowed). Keys follow the
// canonical map, plus n, threads, dataset, checkpoint, out. Values loaded
// here are later overridden by explicit CLI flags. Throws on unknown keys
// or unparsable values, naming the line.
void load_config_file(RunConfig& cfg, const std::string& path);
void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value);

}  // namespace d2d::cli
