#pragma once

// Metric backends for the three closed manifolds:
//   Circle1D        g_11 = phi^2 on a periodic interval, phi > 0
//   ConformalTorus2D g_ij = e^{2w} delta_ij on a periodic rectangle
//   RoundSphere     analytic round n-sphere of radius^2 r2, homogeneous
//                   quantities only (no grid)

#include <variant>

#include "pmeflow/grid.hpp"

namespace pmeflow {

struct Circle1D {
    ScalarField phi; // g_11 = phi^2
    std::vector<double> g11, inv_g11; // cached phi^2 and phi^-2
};

struct ConformalTorus2D {
    ScalarField w; // g = e^{2w}(dx^2 + dy^2)
    std::vector<double> e2w, em2w; // cached e^{2w} and e^{-2w}
};

struct RoundSphere {
    int n = 2;       // dimension, >= 2
    double r2 = 1.0; // radius squared
};

class Geometry {
public:
    enum class Backend { Circle1D, ConformalTorus2D, RoundSphere };

    static Geometry circle(ScalarField phi);
    static Geometry torus(ScalarField w);
    static Geometry sphere(int n, double r2);

    Backend backend() const;
    bool is_grid() const { return backend() != Backend::RoundSphere; }
    /// manifold dimension (sphere: n)
    int dimension() const;
    /// grid of the discrete backends; BackendError on the sphere
    const GridSpec& grid() const;
    int node_count() const { return is_grid() ? grid().node_count() : 1; }

    const ScalarField& phi() const;
    const ScalarField& w() const;
    int sphere_n() const;
    double sphere_r2() const;
    double sphere_area() const;

    /// covariant metric components at a node: {g00, g01, g11} ({g00,0,0} in 1D)
    std::array<double, 3> metric(int node) const;
    std::array<double, 3> inv_metric(int node) const;
    double sqrt_det(int node) const;

    /// cached conformal factors of the grid backends (g11/e2w and inverses)
    const std::vector<double>& conformal_factor() const;
    const std::vector<double>& inv_conformal_factor() const;

    const char* backend_name() const;

private:
    explicit Geometry(std::variant<Circle1D, ConformalTorus2D, RoundSphere> b)
        : backend_(std::move(b)) {}
    std::variant<Circle1D, ConformalTorus2D, RoundSphere> backend_;
};

} // namespace pmeflow
