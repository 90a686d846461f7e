#pragma once

// Finite-difference residuals of the evolution identities satisfied by the
// coupled flow + PME states: metric evolution, the Laplacian / gradient /
// connection evolution equations, the L-operator identities for Lap v,
// |grad v|^2, |grad v|^2/v and S/v, and the full L(F) identity. Every
// identity is evaluated at the middle snapshot of an equally spaced triple;
// time derivatives are centered there.
//
// The L(F) identity is also re-assembled through the component identities
// (identical primitives, pure algebra in between), which pins the long
// formula to rounding error.

#include <map>
#include <string>

#include "pmeflow/run.hpp"

namespace pmeflow {

struct ResidualReport {
    std::string identity;
    double h = 0.0;    // max grid spacing
    double dt = 0.0;   // snapshot spacing
    double linf = 0.0;
    double l2 = 0.0;   // measure-weighted RMS
    double scale = 0.0; // magnitude of the identity's assembled terms
    double floor = 1e-10; // rounding-noise estimate for this stencil
};

/// L(h) = dh/dt - (p-1) v Lap h, centered at the middle field.
ScalarField op_L(const ScalarField& h_prev, const ScalarField& h_mid,
                 const ScalarField& h_next, const Geometry& geom_mid,
                 const ScalarField& v_mid, double p, double dt);

ResidualReport residual_metric_evolution(const Run& run, size_t i);
ResidualReport residual_laplacian_evolution(const Run& run, size_t i);
ResidualReport residual_gradient_evolution(const Run& run, size_t i);
ResidualReport residual_connection_evolution(const Run& run, size_t i);

/// Residuals of the four L identities, keyed "L_lap_v", "L_grad_sq",
/// "L_grad_sq_over_v", "L_S_over_v".
std::map<std::string, ResidualReport> residual_L_identities(const Run& run, size_t i);

ResidualReport residual_F_evolution(const Run& run, size_t i, double b, double d);

/// max |direct RHS - RHS re-assembled through the component identities| for
/// the L(F) identity; pure algebra, so this is rounding-level.
double f_identity_route_gap(const Run& run, size_t i, double b, double d);

struct ConvergenceRow {
    std::string identity;
    std::vector<double> h, dt, linf, l2, scale, floors;
    double order_linf = 0.0;
    double order_l2 = 0.0;
    bool monotone = true;
    bool at_floor = false; // residuals below the rounding floor at all levels
};

/// Least-squares order fit across refinement levels; per_level[l] holds the
/// same identities (by name) at ladder level l.
std::vector<ConvergenceRow> convergence_study(
    const std::vector<std::map<std::string, ResidualReport>>& per_level);

/// Slope of log(residual) vs log(h) by least squares.
double fit_order(const std::vector<double>& h, const std::vector<double>& res);

constexpr double kResidualFloor = 1e-10;
/// residuals below scale * kRelativeFloor are treated as exactly satisfied
/// (cancellation noise amplified by the 1/(dt h^2) stencils)
constexpr double kRelativeFloor = 1e-8;

} // namespace pmeflow
