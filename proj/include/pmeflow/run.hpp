#pragma once

// A recorded run: equally spaced snapshots of the coupled (metric, f, u)
// state, the substrate for the structure/harnack/identity checks. The
// pressure view caches v and its discrete derivatives at one snapshot;
// v_t is centered in the interior and one-sided second order at the ends.

#include <vector>

#include "pmeflow/pme.hpp"

namespace pmeflow {

struct RunSnapshot {
    double t = 0.0;
    Geometry geom;
    std::optional<ScalarField> f;
    std::optional<ScalarField> u;
};

struct Run {
    FlowKind kind;
    double p = 2.0;
    std::vector<RunSnapshot> snaps;

    size_t size() const { return snaps.size(); }
    double snap_dt() const;
    FlowState flow_state(size_t i) const {
        return FlowState{snaps[i].t, snaps[i].geom, snaps[i].f};
    }
    ScalarField pressure(size_t i) const;
};

/// Advance the coupled state with steps of dt and record every `stride`-th
/// state (including the initial one); `steps` total integrator steps.
Run record_run(const FlowState& init, const std::optional<ScalarField>& u0, double p,
               const FlowKind& kind, double dt, int steps, int stride);

struct PressureView {
    double t = 0.0;
    ScalarField v;
    ScalarField v_t;
    VectorField grad_v;
    ScalarField grad_v_sq;
    ScalarField lap_v;
};

PressureView pressure_view(const Run& run, size_t i);

} // namespace pmeflow
