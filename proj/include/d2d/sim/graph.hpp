#pragma once

#include <cstddef>
#include <vector>

#include "d2d/sim/network.hpp"

namespace d2d::sim {

// Directed interference edge: transmitter `src` disturbs receiver `rcv`;
// its gain is A(rcv, src).
struct Edge {
    std::size_t rcv;
    std::size_t src;
};

// Graph view of a network instance. Node feature rows are
// [lambda_i, h_ii, v_i, u_i (d_u), w_i (d_w)]; the edge feature matrix A
// carries off-diagonal gains with a zero diagonal.
struct GraphSample {
    std::size_t n = 0;
    std::size_t d_u = 0;
    std::size_t d_w = 0;
    double p_max = 1.0;  // power cap carried along for the sigmoid scaling
    Matrix z;  // n x (3 + d_u + d_w)
    Matrix a;  // n x n, a(i,i) = 0

    // Edges with nonzero gain, sorted by (rcv, src). in_offsets[i] spans the
    // edges received by node i.
    std::vector<Edge> edges;
    std::vector<std::size_t> in_offsets;  // size n+1
    // Same edges regrouped by source: out_edge_ids[out_offsets[i]..] are
    // indices into `edges` whose src == i, ordered by rcv.
    std::vector<std::size_t> out_edge_ids;
    std::vector<std::size_t> out_offsets;  // size n+1

    std::size_t feature_dim() const { return 3 + d_u + d_w; }
    double lambda(std::size_t i) const { return z(i, 0); }
    double h_direct(std::size_t i) const { return z(i, 1); }
};

// Builds the graph view. v_init must have n entries in [0, sqrt(p_max)];
// u and w feature blocks start at zero.
GraphSample to_graph(const NetworkInstance& inst, std::size_t d_u, std::size_t d_w,
                     const std::vector<double>& v_init);

}  // namespace d2d::sim
