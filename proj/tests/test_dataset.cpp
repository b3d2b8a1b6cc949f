#include <doctest.h>

#include <stdexcept>

#include <cstdio>
#include <filesystem>

#include "d2d/sim/dataset.hpp"
#include "d2d/util/fs.hpp"

using namespace d2d;

namespace {

std::string temp_path(const std::string& leaf) {
    return (std::filesystem::temp_directory_path() / leaf).string();
}

std::vector<sim::NetworkInstance> sample_set(std::size_t count, std::size_t n) {
    std::vector<sim::NetworkInstance> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(sim::generate_rayleigh(n, 0.0, 1.0, 100 + i));
    }
    return out;
}

}  // namespace

TEST_CASE("dataset round trip is bit exact for 64 samples") {
    const auto samples = sample_set(64, 10);
    const std::string path = temp_path("d2d_ds_roundtrip.jsonl");
    sim::save_dataset(samples, {.seed = 42, .config_digest = "feed"}, path);
    const auto loaded = sim::load_dataset(path);
    CHECK(loaded.header.seed == 42);
    CHECK(loaded.header.config_digest == "feed");
    REQUIRE(loaded.samples.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(loaded.samples[i].h == samples[i].h);
        CHECK(loaded.samples[i].lambda == samples[i].lambda);
        CHECK(loaded.samples[i].sigma2 == samples[i].sigma2);
        CHECK(loaded.samples[i].p_max == samples[i].p_max);
    }
    std::remove(path.c_str());
}

TEST_CASE("empty dataset is a valid header-only file") {
    const std::string path = temp_path("d2d_ds_empty.jsonl");
    sim::save_dataset({}, {.seed = 9}, path);
    const auto loaded = sim::load_dataset(path);
    CHECK(loaded.header.seed == 9);
    CHECK(loaded.samples.empty());
    std::remove(path.c_str());
}

TEST_CASE("truncated record fails with a line number and no partial result") {
    const auto samples = sample_set(3, 4);
    const std::string full = sim::serialize_dataset(samples, {.seed = 1});
    // cut the final record in half
    const std::string truncated = full.substr(0, full.size() - 40);
    CHECK_THROWS_WITH_AS(sim::parse_dataset(truncated, "t.jsonl"),
                         doctest::Contains("t.jsonl:4"), std::runtime_error);
}

TEST_CASE("version and header mismatches are explicit errors") {
    CHECK_THROWS_WITH_AS(
        sim::parse_dataset(R"({"format":"d2d-dataset","version":2,"seed":0})" "\n",
                           "v.jsonl"),
        doctest::Contains("version"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        sim::parse_dataset(R"({"format":"something-else","version":1})" "\n", "h.jsonl"),
        doctest::Contains("header"), std::runtime_error);
    CHECK_THROWS_AS(sim::parse_dataset("", "e.jsonl"), std::runtime_error);
}

TEST_CASE("record with wrong matrix shape is rejected") {
    const std::string content =
        R"({"format":"d2d-dataset","version":1,"seed":0})" "\n"
        R"({"n":2,"h":[[1.0,2.0]],"lambda":[1.0,1.0],"sigma2":1.0,"p_max":1.0})" "\n";
    CHECK_THROWS_WITH_AS(sim::parse_dataset(content, "s.jsonl"),
                         doctest::Contains("s.jsonl:2"), std::runtime_error);
}

TEST_CASE("dataset digest separates different sets and matches equal ones") {
    const auto a = sample_set(5, 3);
    const auto b = sample_set(5, 3);
    auto c = sample_set(5, 3);
    c[4].h(0, 0) += 1e-9;
    CHECK(sim::dataset_digest(a) == sim::dataset_digest(b));
    CHECK(sim::dataset_digest(a) != sim::dataset_digest(c));
}
