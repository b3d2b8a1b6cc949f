#include "d2d/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "d2d/exp/report_io.hpp"
#include "d2d/util/digest.hpp"

namespace d2d::cli {

double RunConfig::sigma2() const { return std::pow(10.0, noise_db / 10.0); }

gnn::UwgnnConfig RunConfig::model_config() const {
    gnn::UwgnnConfig cfg;
    cfg.layers = layers;
    cfg.d_u = d_u;
    cfg.d_w = d_w;
    cfg.d_msg = d_msg;
    cfg.hidden_width = hidden_width;
    cfg.share_parameters = share_parameters;
    if (mlp_mode == "equation") {
        cfg.mlp_mode = gnn::MlpMode::Equation;
    } else if (mlp_mode == "paper") {
        cfg.mlp_mode = gnn::MlpMode::PaperTriples;
    } else {
        throw std::invalid_argument("unknown mlp mode '" + mlp_mode +
                                    "' (expected equation|paper)");
    }
    cfg.validate();
    return cfg;
}

sim::ChannelOptions RunConfig::channel_options() const {
    sim::ChannelOptions opts;
    opts.sigma2 = sigma2();
    opts.p_max = p_max;
    opts.weighted = weighted;
    return opts;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out << ',';
        out << v[i];
    }
    return out.str();
}

std::string join_doubles(const std::vector<double>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out << ',';
        out << experiments::format_double(v[i]);
    }
    return out.str();
}

std::vector<std::size_t> parse_sizes(const std::string& csv) {
    std::vector<std::size_t> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(static_cast<std::size_t>(std::stoull(tok)));
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::map<std::string, std::string> RunConfig::canonical_map() const {
    using experiments::format_double;
    std::map<std::string, std::string> m;
    m["seed"] = std::to_string(seed);
    m["noise_db"] = format_double(noise_db);
    m["p_max"] = format_double(p_max);
    m["n_users"] = std::to_string(n_users);
    m["count"] = std::to_string(count);
    m["chan_mean"] = format_double(chan_mean);
    m["chan_std"] = format_double(chan_std);
    m["weighted"] = weighted ? "1" : "0";
    m["mask"] = mask ? "1" : "0";
    m["mask_eta"] = format_double(mask_eta);
    m["layers"] = std::to_string(layers);
    m["d_u"] = std::to_string(d_u);
    m["d_w"] = std::to_string(d_w);
    m["d_msg"] = std::to_string(d_msg);
    m["hidden_width"] = std::to_string(hidden_width);
    m["mlp_mode"] = mlp_mode;
    m["share_parameters"] = share_parameters ? "1" : "0";
    m["lr"] = format_double(lr);
    m["batch_size"] = std::to_string(batch_size);
    m["epochs"] = std::to_string(epochs);
    m["restarts"] = std::to_string(restarts);
    m["suite"] = suite;
    m["eval_count"] = std::to_string(eval_count);
    m["best_restarts"] = std::to_string(best_restarts);
    m["sizes"] = join_sizes(sizes);
    m["eta_grid"] = join_doubles(eta_grid);
    m["direction"] = direction;
    m["shift_family"] = shift_family;
    m["shift_mean"] = format_double(shift_mean);
    m["shift_std"] = format_double(shift_std);
    m["los_strength"] = format_double(los_strength);
    m["speeds"] = join_doubles(speeds);
    m["horizon"] = std::to_string(horizon);
    m["train_sizes"] = join_sizes(train_sizes);
    return m;
}

std::string RunConfig::canonical_text() const {
    std::ostringstream out;
    for (const auto& [k, v] : canonical_map()) out << k << '=' << v << '\n';
    return out.str();
}

std::string RunConfig::digest() const { return digest_hex(canonical_text()); }

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value) {
    if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "threads") cfg.threads = std::stoi(value);
    else if (key == "noise_db" || key == "noise-db") cfg.noise_db = std::stod(value);
    else if (key == "p_max" || key == "p-max") cfg.p_max = std::stod(value);
    else if (key == "n" || key == "n_users" || key == "n-users")
        cfg.n_users = std::stoull(value);
    else if (key == "count") cfg.count = std::stoull(value);
    else if (key == "chan_mean" || key == "chan-mean") cfg.chan_mean = std::stod(value);
    else if (key == "chan_std" || key == "chan-std") cfg.chan_std = std::stod(value);
    else if (key == "weighted") cfg.weighted = parse_bool(value);
    else if (key == "mask") cfg.mask = parse_bool(value);
    else if (key == "mask_eta" || key == "mask-eta") cfg.mask_eta = std::stod(value);
    else if (key == "layers") cfg.layers = std::stoull(value);
    else if (key == "d_u" || key == "d-u") cfg.d_u = std::stoull(value);
    else if (key == "d_w" || key == "d-w") cfg.d_w = std::stoull(value);
    else if (key == "d_msg" || key == "d-msg") cfg.d_msg = std::stoull(value);
    else if (key == "hidden_width" || key == "hidden-width")
        cfg.hidden_width = std::stoull(value);
    else if (key == "mlp_mode" || key == "mlp-mode") cfg.mlp_mode = value;
    else if (key == "share_parameters" || key == "share-parameters")
        cfg.share_parameters = parse_bool(value);
    else if (key == "lr") cfg.lr = std::stod(value);
    else if (key == "batch_size" || key == "batch") cfg.batch_size = std::stoull(value);
    else if (key == "epochs") cfg.epochs = std::stoull(value);
    else if (key == "restarts") cfg.restarts = std::stoull(value);
    else if (key == "suite") cfg.suite = value;
    else if (key == "eval_count" || key == "eval-count")
        cfg.eval_count = std::stoull(value);
    else if (key == "best_restarts" || key == "best-restarts")
        cfg.best_restarts = std::stoull(value);
    else if (key == "sizes") cfg.sizes = parse_sizes(value);
    else if (key == "eta_grid" || key == "eta-grid") cfg.eta_grid = parse_doubles(value);
    else if (key == "direction") cfg.direction = value;
    else if (key == "shift_family" || key == "shift-family") cfg.shift_family = value;
    else if (key == "shift_mean" || key == "shift-mean")
        cfg.shift_mean = std::stod(value);
    else if (key == "shift_std" || key == "shift-std") cfg.shift_std = std::stod(value);
    else if (key == "los_strength" || key == "los") cfg.los_strength = std::stod(value);
    else if (key == "speeds") cfg.speeds = parse_doubles(value);
    else if (key == "horizon") cfg.horizon = std::stoull(value);
    else if (key == "train_sizes" || key == "train-sizes")
        cfg.train_sizes = parse_sizes(value);
    else if (key == "dataset") cfg.dataset_path = value;
    else if (key == "checkpoint") cfg.checkpoint_path = value;
    else if (key == "out") cfg.out_path = value;
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key=value");
        }
        try {
            apply_config_entry(cfg, trim(stripped.substr(0, eq)),
                               trim(stripped.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                                     e.what());
        }
    }
}

}  // namespace d2d::cli
