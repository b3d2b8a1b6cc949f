#include "d2d/wmmse/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "d2d/util/rng.hpp"

namespace d2d::wmmse {

namespace {
constexpr double kDenomFloor = 1e-12;

bool all_finite(const std::vector<double>& x) {
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}
}  // namespace

double sum_rate(const NetworkInstance& inst, const std::vector<double>& p) {
    const std::size_t n = inst.n_users;
    if (p.size() != n) throw std::invalid_argument("sum_rate: power vector length mismatch");
    for (double pi : p) {
        if (pi < 0.0) throw std::invalid_argument("sum_rate: negative power");
    }
    double rate = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double interference = inst.sigma2;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double hij = inst.h(i, j);
            interference += hij * hij * p[j];
        }
        const double hii = inst.h(i, i);
        rate += inst.lambda[i] * std::log2(1.0 + hii * hii * p[i] / interference);
    }
    return rate;
}

std::vector<double> mse_e(const NetworkInstance& inst, const std::vector<double>& u,
                          const std::vector<double>& v) {
    const std::size_t n = inst.n_users;
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double direct = 1.0 - u[i] * inst.h(i, i) * v[i];
        double acc = direct * direct + inst.sigma2 * u[i] * u[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double cross = u[i] * inst.h(i, j) * v[j];
            acc += cross * cross;
        }
        e[i] = acc;
    }
    return e;
}

double wmmse_cost(const NetworkInstance& inst, const WmmseState& state) {
    const auto e = mse_e(inst, state.u, state.v);
    double cost = 0.0;
    for (std::size_t i = 0; i < inst.n_users; ++i) {
        cost += inst.lambda[i] * (state.w[i] * e[i] - std::log(state.w[i]));
    }
    return cost;
}

std::vector<double> update_u(const NetworkInstance& inst, const WmmseState& state) {
    const std::size_t n = inst.n_users;
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        double den = inst.sigma2;
        for (std::size_t j = 0; j < n; ++j) {
            const double hij = inst.h(i, j);
            den += hij * hij * state.v[j] * state.v[j];
        }
        u[i] = inst.h(i, i) * state.v[i] / (den + kDenomFloor);
    }
    return u;
}

std::vector<double> update_w(const NetworkInstance& inst, const WmmseState& state) {
    const std::size_t n = inst.n_users;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double den = 1.0 - state.u[i] * inst.h(i, i) * state.v[i];
        w[i] = 1.0 / std::max(den, kDenomFloor);
    }
    return w;
}

std::vector<double> update_v(const NetworkInstance& inst, const WmmseState& state,
                             bool* clipped) {
    const std::size_t n = inst.n_users;
    const double v_cap = std::sqrt(inst.p_max);
    std::vector<double> v(n);
    bool any_clip = false;
    for (std::size_t i = 0; i < n; ++i) {
        double den = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double hji = inst.h(j, i);
            den += hji * hji * state.u[j] * state.u[j] * state.w[j];
        }
        double vi = inst.lambda[i] * state.u[i] * inst.h(i, i) * state.w[i] /
                    (den + kDenomFloor);
        if (vi < 0.0) {
            vi = 0.0;
            any_clip = true;
        } else if (vi > v_cap) {
            vi = v_cap;
            any_clip = true;
        }
        v[i] = vi;
    }
    if (clipped != nullptr) *clipped = any_clip;
    return v;
}

std::vector<double> full_power_v0(const NetworkInstance& inst) {
    return std::vector<double>(inst.n_users, std::sqrt(inst.p_max));
}

SolveResult solve(const NetworkInstance& inst, std::size_t max_iter, double tol,
                  const std::vector<double>& v0) {
    inst.validate();
    if (max_iter == 0) throw std::invalid_argument("solve: max_iter must be >= 1");
    if (v0.size() != inst.n_users) {
        throw std::invalid_argument("solve: v0 length mismatch");
    }
    const double v_cap = std::sqrt(inst.p_max);
    for (double v : v0) {
        if (!(v >= 0.0 && v <= v_cap * (1.0 + 1e-12))) {
            throw std::invalid_argument("solve: infeasible v0");
        }
    }

    WmmseState state;
    state.v = v0;
    state.u.assign(inst.n_users, 0.0);
    state.w.assign(inst.n_users, 1.0);

    for (std::size_t k = 1; k <= max_iter; ++k) {
        state.u = update_u(inst, state);
        state.w = update_w(inst, state);
        bool clip = false;
        state.v = update_v(inst, state, &clip);
        state.clipped = state.clipped || clip;
        state.k = k;

        if (!all_finite(state.u) || !all_finite(state.w) || !all_finite(state.v)) {
            throw std::runtime_error("wmmse solve: non-finite iterate at round " +
                                     std::to_string(k));
        }
        const double cost = wmmse_cost(inst, state);
        if (!std::isfinite(cost)) {
            throw std::runtime_error("wmmse solve: non-finite cost at round " +
                                     std::to_string(k));
        }
        state.cost_trace.push_back(cost);
        if (k >= 2) {
            const double prev = state.cost_trace[k - 2];
            if (std::abs(cost - prev) <= tol) break;
        }
    }

    SolveResult out;
    out.p.resize(inst.n_users);
    for (std::size_t i = 0; i < inst.n_users; ++i) {
        out.p[i] = std::min(state.v[i] * state.v[i], inst.p_max);
    }
    out.state = std::move(state);
    return out;
}

SolveResult solve(const NetworkInstance& inst) {
    return solve(inst, 100, 1e-5, full_power_v0(inst));
}

BestOfResult solve_best_of(const NetworkInstance& inst, std::size_t restarts,
                           std::uint64_t seed, std::size_t max_iter, double tol) {
    if (restarts == 0) throw std::invalid_argument("solve_best_of: restarts must be >= 1");
    const double v_cap = std::sqrt(inst.p_max);
    Rng rng(seed);
    BestOfResult best;
    best.rate = -1.0;
    for (std::size_t r = 0; r < restarts; ++r) {
        std::vector<double> v0;
        if (r == 0) {
            v0 = full_power_v0(inst);
        } else {
            v0.resize(inst.n_users);
            for (double& v : v0) v = v_cap * rng.uniform01();
        }
        auto res = solve(inst, max_iter, tol, v0);
        const double rate = sum_rate(inst, res.p);
        if (rate > best.rate) {
            best.rate = rate;
            best.p = std::move(res.p);
        }
    }
    return best;
}

}  // namespace d2d::wmmse
