#include "d2d/sim/dataset.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "d2d/util/digest.hpp"
#include "d2d/util/fs.hpp"

namespace d2d::sim {

using nlohmann::json;

namespace {

json instance_to_json(const NetworkInstance& inst) {
    json h = json::array();
    for (std::size_t i = 0; i < inst.n_users; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < inst.n_users; ++j) row.push_back(inst.h(i, j));
        h.push_back(std::move(row));
    }
    return json{{"n", inst.n_users},
                {"h", std::move(h)},
                {"lambda", inst.lambda},
                {"sigma2", inst.sigma2},
                {"p_max", inst.p_max}};
}

NetworkInstance instance_from_json(const json& j) {
    NetworkInstance inst;
    inst.n_users = j.at("n").get<std::size_t>();
    const auto& h = j.at("h");
    if (!h.is_array() || h.size() != inst.n_users) {
        throw std::runtime_error("channel matrix row count mismatch");
    }
    inst.h = Matrix(inst.n_users, inst.n_users);
    for (std::size_t r = 0; r < inst.n_users; ++r) {
        const auto& row = h.at(r);
        if (!row.is_array() || row.size() != inst.n_users) {
            throw std::runtime_error("channel matrix column count mismatch");
        }
        for (std::size_t c = 0; c < inst.n_users; ++c) {
            inst.h(r, c) = row.at(c).get<double>();
        }
    }
    inst.lambda = j.at("lambda").get<std::vector<double>>();
    inst.sigma2 = j.at("sigma2").get<double>();
    inst.p_max = j.at("p_max").get<double>();
    inst.validate();
    return inst;
}

}  // namespace

std::string serialize_dataset(const std::vector<NetworkInstance>& samples,
                              const DatasetHeader& header) {
    std::ostringstream out;
    json head = {{"format", "d2d-dataset"}, {"version", 1}, {"seed", header.seed}};
    if (!header.config_digest.empty()) head["config_digest"] = header.config_digest;
    out << head.dump() << '\n';
    for (const auto& inst : samples) out << instance_to_json(inst).dump() << '\n';
    return out.str();
}

void save_dataset(const std::vector<NetworkInstance>& samples,
                  const DatasetHeader& header, const std::string& path) {
    atomic_write(path, serialize_dataset(samples, header));
}

Dataset parse_dataset(const std::string& content, const std::string& origin) {
    Dataset out;
    std::istringstream in(content);
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": parse error: " + e.what());
        }
        if (!saw_header) {
            if (j.value("format", "") != "d2d-dataset") {
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": missing d2d-dataset header");
            }
            if (j.value("version", -1) != 1) {
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": unsupported dataset version");
            }
            out.header.seed = j.value("seed", std::uint64_t{0});
            out.header.config_digest = j.value("config_digest", "");
            saw_header = true;
            continue;
        }
        try {
            out.samples.push_back(instance_from_json(j));
        } catch (const std::exception& e) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": bad record: " + e.what());
        }
    }
    if (!saw_header) {
        throw std::runtime_error(origin + ":1: empty file, expected dataset header");
    }
    return out;
}

Dataset load_dataset(const std::string& path) {
    return parse_dataset(read_file(path), path);
}

std::string dataset_digest(const std::vector<NetworkInstance>& samples) {
    Fnv64 fnv;
    for (const auto& inst : samples) fnv.update(instance_to_json(inst).dump());
    return fnv.hex();
}

}  // namespace d2d::sim
