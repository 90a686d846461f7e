#include "support.hpp"

#include <cmath>

#include "pmeflow/distance.hpp"

namespace pmeflow::test {

ScalarField linear_heat_run(const Geometry& geom, ScalarField u0, const ScalarField& S,
                            double dt, int steps) {
    ScalarField u = std::move(u0);
    int N = u.size();
    for (int k = 0; k < steps; ++k) {
        ScalarField r1 = laplace_beltrami(geom, u);
        for (int i = 0; i < N; ++i) r1[i] += S[i] * u[i];
        ScalarField pred(u.grid());
        for (int i = 0; i < N; ++i) pred[i] = u[i] + dt * r1[i];
        ScalarField r2 = laplace_beltrami(geom, pred);
        for (int i = 0; i < N; ++i) r2[i] += S[i] * pred[i];
        for (int i = 0; i < N; ++i) u[i] += 0.5 * dt * (r1[i] + r2[i]);
    }
    return u;
}

namespace {

std::vector<std::array<int, 2>> lattice_moves(const GridSpec& g) {
    std::vector<std::array<int, 2>> moves{{0, 0}};
    if (g.dim == 1) {
        moves.push_back({-1, 0});
        moves.push_back({+1, 0});
    } else {
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                if (a || b) moves.push_back({a, b});
    }
    return moves;
}

double move_cost(const ActionSlice& a, const ActionSlice& b, int y, int x,
                 const std::array<int, 2>& mv) {
    double dt = b.t - a.t;
    double len = 0.5 * (edge_length_at(a.geom, y, mv[0], mv[1]) +
                        edge_length_at(b.geom, x, mv[0], mv[1]));
    return dt * 0.5 * (a.S[y] + b.S[x]) + len * len / dt;
}

double enumerate(const std::vector<ActionSlice>& slices, size_t k, int node, int x2,
                 const std::vector<std::array<int, 2>>& moves) {
    if (k + 1 == slices.size())
        return node == x2 ? 0.0 : std::numeric_limits<double>::infinity();
    const GridSpec& g = slices[0].geom.grid();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& mv : moves) {
        int next = g.shift(node, 0, mv[0]);
        if (g.dim == 2) next = g.shift(next, 1, mv[1]);
        double tail = enumerate(slices, k + 1, next, x2, moves);
        if (tail == std::numeric_limits<double>::infinity()) continue;
        best = std::min(best, move_cost(slices[k], slices[k + 1], node, next, mv) + tail);
    }
    return best;
}

} // namespace

double brute_force_action(const std::vector<ActionSlice>& slices, int x1, int x2) {
    return enumerate(slices, 0, x1, x2, lattice_moves(slices[0].geom.grid()));
}

double path_action(const std::vector<ActionSlice>& slices, const std::vector<int>& nodes) {
    const GridSpec& g = slices[0].geom.grid();
    double total = 0.0;
    for (size_t k = 0; k + 1 < slices.size(); ++k) {
        auto a = g.coords(nodes[k]);
        auto b = g.coords(nodes[k + 1]);
        std::array<int, 2> mv{0, 0};
        for (int axis = 0; axis < g.dim; ++axis) {
            int d = b[axis] - a[axis];
            int m = g.n[axis];
            d = ((d + m / 2) % m + m) % m - m / 2; // minimal image
            mv[axis] = d;
        }
        total += move_cost(slices[k], slices[k + 1], nodes[k], nodes[k + 1], mv);
    }
    return total;
}

ScalarField make_field(const GridSpec& g, const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for (int node = 0; node < g.node_count(); ++node) {
        auto xy = g.coords(node);
        out[node] = f(xy[0] * g.spacing(0), g.dim == 2 ? xy[1] * g.spacing(1) : 0.0);
    }
    return out;
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace pmeflow::test
