#pragma once

// Experiment orchestration behind the CLI: builds initial data from the
// config presets, drives the solvers, and emits the CSV/summary artifacts.
// Also exposes the manufactured-data builders and the identity refinement
// ladder so the test suites can run the same cases directly.

#include <iosfwd>

#include "pmeflow/config.hpp"
#include "pmeflow/identities.hpp"

namespace pmeflow {

ScalarField preset_w(const GridSpec& g, MetricPreset preset, double amplitude,
                     std::uint64_t seed);
ScalarField preset_phi(const GridSpec& g, MetricPreset preset, double amplitude);
ScalarField preset_u0(const GridSpec& g, InitialPreset preset, double amplitude,
                      double floor_value, double constant_value, double width, int modes,
                      std::uint64_t seed);
ScalarField preset_f0(const GridSpec& g, double amplitude, int mode);

Geometry build_geometry(const RunConfig& cfg);
std::optional<ScalarField> build_u0(const RunConfig& cfg, const Geometry& geom);
std::optional<ScalarField> build_f0(const RunConfig& cfg, const Geometry& geom);

/// Advance silently for steps_before steps of dt, then record `window`
/// consecutive states (spacing dt).
Run record_window(const FlowState& init, const std::optional<ScalarField>& u0, double p,
                  const FlowKind& kind, double dt, int steps_before, int window);

/// All identity residuals at snapshot i: the evolution identities plus the
/// four L identities and L_F (keyed as in identities.hpp).
std::map<std::string, ResidualReport> identity_residuals_at(const Run& run, size_t i,
                                                            double b, double d);

/// Ladder setups: "static-flat" (flat torus) and "ricci-2d" (curved torus
/// under Ricci flow), both PME-coupled with band-limited initial data.
Run identity_window_run(const std::string& setup, int resolution, double t_eval,
                        double kappa, double p);
double identity_kappa(const std::string& setup, int finest_resolution, double p,
                      double safety);

/// per-identity fitted-order thresholds (1.8, or 1.5 for the composed
/// third-derivative stencils)
double identity_order_threshold(const std::string& identity);

struct IdentitySuiteResult {
    std::vector<ConvergenceRow> rows; // identity names prefixed "setup/"
    double bochner_order = 0.0;
    bool bochner_gate_ok = false; // suite refuses to pass when the gate fails
    bool pass = false;
    std::vector<std::string> failures;
};

IdentitySuiteResult run_identity_suite(const std::vector<int>& ladder, double t_eval,
                                       double safety, double p);

struct ZooRow {
    std::string kind;
    std::string quantity;
    double closed_form = 0.0; // L-infinity of the closed-form field
    double discrete = 0.0;    // L-infinity of the generic assembly
    double gap = 0.0;         // L-infinity of the difference
    bool pass = false;
};
std::vector<ZooRow> flow_zoo();

/// Executes the configured mode, writing artifacts under the output
/// directory. Exit code: 0 pass / not-applicable, 1 check failure,
/// 3 solver error.
int run_config(const RunConfig& cfg, std::ostream& log);

std::string resolve_output_dir(const RunConfig& cfg);

} // namespace pmeflow
