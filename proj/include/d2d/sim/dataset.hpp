#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2d/sim/network.hpp"

namespace d2d::sim {

// JSON-lines dataset. First line is a header record
//   {"format": "d2d-dataset", "version": 1, "seed": <int>, ...}
// followed by one record per instance:
//   {"n": int, "h": [[...]], "lambda": [...], "sigma2": x, "p_max": x}
// Doubles round-trip bit-exactly.

struct DatasetHeader {
    std::uint64_t seed = 0;
    std::string config_digest;  // optional, empty when absent
};

std::string serialize_dataset(const std::vector<NetworkInstance>& samples,
                              const DatasetHeader& header);

void save_dataset(const std::vector<NetworkInstance>& samples,
                  const DatasetHeader& header, const std::string& path);

struct Dataset {
    DatasetHeader header;
    std::vector<NetworkInstance> samples;
};

// Throws std::runtime_error naming the 1-based line number on malformed
// input; a failed parse returns nothing partial.
Dataset parse_dataset(const std::string& content, const std::string& origin);
Dataset load_dataset(const std::string& path);

// Content fingerprint (over the canonical serialization, header excluded).
std::string dataset_digest(const std::vector<NetworkInstance>& samples);

}  // namespace d2d::sim
