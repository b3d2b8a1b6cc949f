#include "d2d/nn/checkpoint.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "d2d/util/fs.hpp"

namespace d2d::nn {

using nlohmann::json;

void save_params(const ParamSet& params, const CheckpointMeta& meta,
                 const std::string& path) {
    json tensors = json::array();
    for (const auto& t : params) {
        for (double v : t.values) {
            if (!std::isfinite(v)) {
                throw std::runtime_error("checkpoint: non-finite value in tensor '" +
                                         t.name + "'");
            }
        }
        tensors.push_back({{"name", t.name}, {"shape", t.shape}, {"values", t.values}});
    }
    json meta_obj = json::object();
    for (const auto& [k, v] : meta) meta_obj[k] = v;
    meta_obj["param_count"] = param_count(params);
    const json doc = {{"format", "uwgnn-ckpt"},
                      {"version", 1},
                      {"meta", meta_obj},
                      {"tensors", tensors}};
    atomic_write(path, doc.dump());
}

Checkpoint load_params(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw std::runtime_error("checkpoint parse error in " + path + ": " + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != "uwgnn-ckpt") {
        throw std::runtime_error("checkpoint: not a uwgnn-ckpt file: " + path);
    }
    if (doc.value("version", -1) != 1) {
        throw std::runtime_error("checkpoint: unsupported version in " + path);
    }
    Checkpoint out;
    for (const auto& [k, v] : doc.at("meta").items()) {
        if (v.is_string()) {
            out.meta[k] = v.get<std::string>();
        } else {
            out.meta[k] = v.dump();
        }
    }
    for (const auto& jt : doc.at("tensors")) {
        ParamTensor t;
        t.name = jt.at("name").get<std::string>();
        t.shape = jt.at("shape").get<std::vector<std::size_t>>();
        t.values = jt.at("values").get<std::vector<double>>();
        std::size_t expect = 1;
        for (std::size_t s : t.shape) expect *= s;
        if (expect != t.values.size()) {
            throw std::runtime_error("checkpoint: shape/value mismatch for tensor '" +
                                     t.name + "' in " + path);
        }
        for (double v : t.values) {
            if (!std::isfinite(v)) {
                throw std::runtime_error("checkpoint: non-finite value in tensor '" +
                                         t.name + "' in " + path);
            }
        }
        out.params.push_back(std::move(t));
    }
    return out;
}

}  // namespace d2d::nn
