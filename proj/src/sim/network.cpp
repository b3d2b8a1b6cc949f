#include "d2d/sim/network.hpp"

#include <cmath>
#include <stdexcept>

#include "d2d/util/rng.hpp"

namespace d2d::sim {

void NetworkInstance::validate() const {
    if (n_users == 0) throw std::invalid_argument("instance: n_users must be >= 1");
    if (h.rows() != n_users || h.cols() != n_users) {
        throw std::invalid_argument("instance: channel matrix shape mismatch");
    }
    if (lambda.size() != n_users) {
        throw std::invalid_argument("instance: weight vector length mismatch");
    }
    bool any_positive = false;
    for (double l : lambda) {
        if (!(l >= 0.0)) throw std::invalid_argument("instance: negative weight");
        if (l > 0.0) any_positive = true;
    }
    if (!any_positive) throw std::invalid_argument("instance: all weights zero");
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double v = h.data()[i];
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("instance: channel gains must be finite and nonnegative");
        }
    }
    if (!(sigma2 > 0.0)) throw std::invalid_argument("instance: sigma2 must be > 0");
    if (!(p_max > 0.0)) throw std::invalid_argument("instance: p_max must be > 0");
}

NetworkInstance generate_channel(std::size_t n, double mean, double std,
                                 std::uint64_t seed, const ChannelOptions& opts) {
    if (n == 0) throw std::invalid_argument("generate_channel: n must be >= 1");
    if (!(std > 0.0)) throw std::invalid_argument("generate_channel: std must be > 0");

    NetworkInstance inst;
    inst.n_users = n;
    inst.h = Matrix(n, n);
    inst.lambda.assign(n, 1.0);
    inst.sigma2 = opts.sigma2;
    inst.p_max = opts.p_max;

    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double re = rng.normal(mean, std);
            const double im = rng.normal(mean, std);
            inst.h(i, j) = std::hypot(re, im);
        }
    }
    if (opts.weighted) {
        for (std::size_t i = 0; i < n; ++i) inst.lambda[i] = rng.uniform01();
    }
    return inst;
}

NetworkInstance mask_topology(const NetworkInstance& inst, double eta_lc,
                              std::uint64_t seed) {
    NetworkInstance out = inst;
    Rng rng(seed);
    for (std::size_t i = 0; i < inst.n_users; ++i) {
        for (std::size_t j = 0; j < inst.n_users; ++j) {
            if (i == j) continue;
            const double c = rng.normal();
            if (c < eta_lc) out.h(i, j) = 0.0;
        }
    }
    return out;
}

double link_distance(const GeometryState& geo, std::size_t i, std::size_t j) {
    const double dx = geo.rx_pos(i, 0) - geo.tx_pos(j, 0);
    const double dy = geo.rx_pos(i, 1) - geo.tx_pos(j, 1);
    return std::hypot(dx, dy);
}

GeometricInstance make_geometric_instance(std::size_t n, std::uint64_t seed,
                                          const ChannelOptions& copts, double speed,
                                          const MobilityOptions& mopts) {
    GeometricInstance out;
    out.inst = generate_channel(n, 0.0, 1.0, derive_seed(seed, "geo-fading"), copts);

    Rng rng(derive_seed(seed, "geo-layout"));
    out.geo.tx_pos = Matrix(n, 2);
    out.geo.rx_pos = Matrix(n, 2);
    out.geo.speed = speed;
    for (std::size_t i = 0; i < n; ++i) {
        out.geo.tx_pos(i, 0) = rng.uniform(0.0, 1000.0);
        out.geo.tx_pos(i, 1) = rng.uniform(0.0, 1000.0);
        const double d = rng.uniform(30.0, 90.0);
        const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        out.geo.rx_pos(i, 0) = out.geo.tx_pos(i, 0) + d * std::cos(theta);
        out.geo.rx_pos(i, 1) = out.geo.tx_pos(i, 1) + d * std::sin(theta);
    }
    // Coverage rule applies from the start so step_mobility with speed 0 is
    // an exact identity.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (link_distance(out.geo, i, j) > mopts.coverage_m) out.inst.h(i, j) = 0.0;
        }
    }
    return out;
}

GeometricInstance step_mobility(const GeometryState& geo, const NetworkInstance& inst,
                                std::uint64_t seed, const MobilityOptions& mopts) {
    const std::size_t n = inst.n_users;
    GeometricInstance out;
    out.geo = geo;
    out.inst = inst;

    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        out.geo.rx_pos(i, 0) = geo.rx_pos(i, 0) + geo.speed * rng.normal();
        out.geo.rx_pos(i, 1) = geo.rx_pos(i, 1) + geo.speed * rng.normal();
    }

    const double half_alpha = mopts.pathloss_alpha / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d_old =
                std::max(link_distance(geo, i, j), mopts.min_distance_m);
            const double d_new =
                std::max(link_distance(out.geo, i, j), mopts.min_distance_m);
            if (d_new > mopts.coverage_m) {
                out.inst.h(i, j) = 0.0;
            } else if (d_new != d_old) {
                out.inst.h(i, j) = inst.h(i, j) * std::pow(d_old / d_new, half_alpha);
            }
        }
    }
    return out;
}

}  // namespace d2d::sim
