#include "pmeflow/distance.hpp"

#include <cmath>
#include <limits>
#include <queue>

namespace pmeflow {

double edge_length_at(const Geometry& geom, int node, int dx0, int dx1) {
    const GridSpec& g = geom.grid();
    double d0 = dx0 * g.spacing(0);
    double d1 = g.dim == 2 ? dx1 * g.spacing(1) : 0.0;
    auto m = geom.metric(node);
    double q = m[0] * d0 * d0 + 2.0 * m[1] * d0 * d1 + m[2] * d1 * d1;
    return std::sqrt(q);
}

ScalarField geodesic_distance(const Geometry& geom, int source_node) {
    if (!geom.is_grid())
        throw BackendError("geodesic_distance needs a grid backend");
    const GridSpec& g = geom.grid();
    int N = g.node_count();
    if (source_node < 0 || source_node >= N)
        throw ConfigError("geodesic_distance: source node out of range");

    // neighbor offsets: 1D {-1,+1}; 2D the 8 surrounding cells
    std::vector<std::array<int, 2>> moves;
    if (g.dim == 1) {
        moves = {{-1, 0}, {+1, 0}};
    } else {
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                if (a != 0 || b != 0) moves.push_back({a, b});
    }

    std::vector<double> dist(N, std::numeric_limits<double>::infinity());
    dist[source_node] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    heap.push({0.0, source_node});

    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (auto mv : moves) {
            int v = g.shift(u, 0, mv[0]);
            if (g.dim == 2) v = g.shift(v, 1, mv[1]);
            double w = 0.5 * (edge_length_at(geom, u, mv[0], mv[1]) +
                              edge_length_at(geom, v, mv[0], mv[1]));
            if (d + w < dist[v]) {
                dist[v] = d + w;
                heap.push({dist[v], v});
            }
        }
    }
    return ScalarField(g, std::move(dist));
}

} // namespace pmeflow
