#include "d2d/sim/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace d2d::sim {

GraphSample to_graph(const NetworkInstance& inst, std::size_t d_u, std::size_t d_w,
                     const std::vector<double>& v_init) {
    inst.validate();
    const std::size_t n = inst.n_users;
    if (v_init.size() != n) {
        throw std::invalid_argument("to_graph: v_init length " +
                                    std::to_string(v_init.size()) + " != n " +
                                    std::to_string(n));
    }
    const double v_cap = std::sqrt(inst.p_max);
    for (double v : v_init) {
        if (!(v >= 0.0 && v <= v_cap)) {
            throw std::invalid_argument("to_graph: v_init outside [0, sqrt(p_max)]");
        }
    }

    GraphSample g;
    g.n = n;
    g.d_u = d_u;
    g.d_w = d_w;
    g.p_max = inst.p_max;
    g.z = Matrix(n, 3 + d_u + d_w);
    g.a = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        g.z(i, 0) = inst.lambda[i];
        g.z(i, 1) = inst.h(i, i);
        g.z(i, 2) = v_init[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) g.a(i, j) = inst.h(i, j);
        }
    }

    g.in_offsets.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        g.in_offsets[i] = g.edges.size();
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && g.a(i, j) != 0.0) g.edges.push_back({i, j});
        }
    }
    g.in_offsets[n] = g.edges.size();

    g.out_offsets.assign(n + 1, 0);
    for (const Edge& e : g.edges) ++g.out_offsets[e.src + 1];
    for (std::size_t i = 0; i < n; ++i) g.out_offsets[i + 1] += g.out_offsets[i];
    g.out_edge_ids.assign(g.edges.size(), 0);
    std::vector<std::size_t> cursor(g.out_offsets.begin(), g.out_offsets.end() - 1);
    // edges are (rcv, src)-sorted, so per-source groups come out rcv-sorted
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        g.out_edge_ids[cursor[g.edges[e].src]++] = e;
    }
    return g;
}

}  // namespace d2d::sim
