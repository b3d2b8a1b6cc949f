#pragma once

#include <cstdint>
#include <vector>

#include "d2d/sim/network.hpp"

namespace d2d::wmmse {

using sim::NetworkInstance;

// Iterates of the block coordinate descent plus the per-round objective.
struct WmmseState {
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> w;
    std::size_t k = 0;                // completed rounds
    std::vector<double> cost_trace;   // weighted sum-MSE objective per round
    bool clipped = false;             // any v projection hit the bound
};

// Weighted sum rate sum_i lambda_i * log2(1 + SINR_i), bits per channel use.
// Throws on negative power.
double sum_rate(const NetworkInstance& inst, const std::vector<double>& p);

// Per-user MSE e_i = (1 - u_i h_ii v_i)^2 + sum_{j != i} (u_i h_ij v_j)^2
//                  + sigma^2 u_i^2.
std::vector<double> mse_e(const NetworkInstance& inst, const std::vector<double>& u,
                          const std::vector<double>& v);

// Weighted sum-MSE objective sum_i lambda_i (w_i e_i - ln w_i).
double wmmse_cost(const NetworkInstance& inst, const WmmseState& state);

// The three closed-form block updates. update_v projects onto
// [0, sqrt(p_max)] and reports whether the projection was active.
std::vector<double> update_u(const NetworkInstance& inst, const WmmseState& state);
std::vector<double> update_w(const NetworkInstance& inst, const WmmseState& state);
std::vector<double> update_v(const NetworkInstance& inst, const WmmseState& state,
                             bool* clipped = nullptr);

struct SolveResult {
    std::vector<double> p;
    WmmseState state;
};

// Block coordinate descent until |cost_k - cost_{k-1}| <= tol or max_iter
// rounds. Throws std::runtime_error naming the round on non-finite
// intermediates.
SolveResult solve(const NetworkInstance& inst, std::size_t max_iter, double tol,
                  const std::vector<double>& v0);

// Defaults matching the evaluation baseline: full power start, 100 rounds,
// tol 1e-5.
SolveResult solve(const NetworkInstance& inst);

std::vector<double> full_power_v0(const NetworkInstance& inst);

struct BestOfResult {
    std::vector<double> p;
    double rate = 0.0;
};

// Best sum rate over `restarts` initializations; restart 0 always uses the
// full-power start, later restarts draw v0 ~ U(0, sqrt(p_max))^n.
BestOfResult solve_best_of(const NetworkInstance& inst, std::size_t restarts,
                           std::uint64_t seed, std::size_t max_iter = 100,
                           double tol = 1e-5);

}  // namespace d2d::wmmse
