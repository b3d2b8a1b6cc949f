#pragma once

#include <cstdint>
#include <vector>

#include "d2d/nn/tensor.hpp"

namespace d2d::sim {

using nn::Matrix;

// One D2D scenario. h(i, j) is the channel magnitude from transmitter j to
// receiver i; the diagonal holds the direct links.
struct NetworkInstance {
    std::size_t n_users = 0;
    Matrix h;                    // n x n, nonnegative magnitudes
    std::vector<double> lambda;  // rate weights, >= 0, at least one positive
    double sigma2 = 1.0;         // noise power, linear scale
    double p_max = 1.0;

    void validate() const;  // throws std::invalid_argument on broken invariants
};

struct ChannelOptions {
    double sigma2 = 1.0;
    double p_max = 1.0;
    bool weighted = false;  // lambda_i ~ U(0,1) instead of all-ones
};

// Channel magnitudes |x + iy| with x, y ~ N(mean, std^2). mean = 0 gives
// Rayleigh fading, mean > 0 adds a line-of-sight component (Rician).
NetworkInstance generate_channel(std::size_t n, double mean, double std,
                                 std::uint64_t seed, const ChannelOptions& opts = {});

inline NetworkInstance generate_rayleigh(std::size_t n, double mean, double std,
                                         std::uint64_t seed,
                                         const ChannelOptions& opts = {}) {
    return generate_channel(n, mean, std, seed, opts);
}

// Removes off-diagonal entries whose i.i.d. standard-normal score falls
// below eta_lc. Direct links are never masked.
NetworkInstance mask_topology(const NetworkInstance& inst, double eta_lc,
                              std::uint64_t seed);

// Transmitter/receiver placement for mobility runs. Positions in meters;
// receivers start U(30, 90) meters from their transmitter inside [0,1000]^2.
struct GeometryState {
    Matrix tx_pos;  // n x 2
    Matrix rx_pos;  // n x 2
    double speed = 0.0;  // per-step displacement std, meters
};

// Distance from transmitter j to receiver i.
double link_distance(const GeometryState& geo, std::size_t i, std::size_t j);

struct GeometricInstance {
    NetworkInstance inst;
    GeometryState geo;
};

struct MobilityOptions {
    double pathloss_alpha = 2.0;
    double coverage_m = 1000.0;  // pairs beyond this distance get h = 0
    double min_distance_m = 1.0; // floor for pathloss ratios
};

// Fading instance plus geometry; links beyond coverage start at zero so a
// zero-speed step is an exact identity.
GeometricInstance make_geometric_instance(std::size_t n, std::uint64_t seed,
                                          const ChannelOptions& copts = {},
                                          double speed = 0.0,
                                          const MobilityOptions& mopts = {});

// One mobility step: every receiver moves by a 2-D Gaussian with per-axis
// std `geo.speed`; gains are rescaled by (d_old/d_new)^(alpha/2) and links
// beyond coverage are zeroed.
GeometricInstance step_mobility(const GeometryState& geo, const NetworkInstance& inst,
                                std::uint64_t seed, const MobilityOptions& mopts = {});

}  // namespace d2d::sim
