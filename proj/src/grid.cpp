#include "pmeflow/grid.hpp"

#include <algorithm>
#include <cmath>

namespace pmeflow {

GridSpec GridSpec::circle(int nx, double L) {
    if (nx < 8) throw ConfigError("grid resolution must be >= 8, got " + std::to_string(nx));
    if (L <= 0.0) throw ConfigError("domain length must be positive");
    GridSpec g;
    g.dim = 1;
    g.n = {nx, 1};
    g.length = {L, 1.0};
    return g;
}

GridSpec GridSpec::torus(int nx, int ny, double Lx, double Ly) {
    if (nx < 8 || ny < 8)
        throw ConfigError("grid resolution must be >= 8 per axis");
    if (Lx <= 0.0 || Ly <= 0.0) throw ConfigError("domain lengths must be positive");
    GridSpec g;
    g.dim = 2;
    g.n = {nx, ny};
    g.length = {Lx, Ly};
    return g;
}

GridSpec GridSpec::homogeneous() {
    GridSpec g;
    g.dim = 0;
    g.n = {1, 1};
    g.length = {1.0, 1.0};
    return g;
}

double GridSpec::cell_volume() const {
    if (dim == 1) return spacing(0);
    if (dim == 2) return spacing(0) * spacing(1);
    return 1.0;
}

int GridSpec::shift(int node, int axis, int step) const {
    auto c = coords(node);
    int m = n[axis];
    c[axis] = ((c[axis] + step) % m + m) % m;
    return index(c[0], c[1]);
}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values)
    : grid_(grid), v_(std::move(values)) {
    if (static_cast<int>(v_.size()) != grid_.node_count())
        throw ConfigError("scalar field size does not match grid node count");
}

double ScalarField::max() const { return *std::max_element(v_.begin(), v_.end()); }
double ScalarField::min() const { return *std::min_element(v_.begin(), v_.end()); }

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

bool ScalarField::all_finite() const {
    for (double x : v_)
        if (!std::isfinite(x)) return false;
    return true;
}

double SymTensorField::max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

} // namespace pmeflow
