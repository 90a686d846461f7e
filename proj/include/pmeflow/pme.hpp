#pragma once

// Porous medium equation with potential, du/dt = Lap(u^p) + S u, p > 1,
// coupled to the geometric flow: metric and density advance inside the same
// RK2 stages (no operator splitting). The pressure v = p/(p-1) u^{p-1}
// satisfies dv/dt = (p-1) v Lap v + |grad v|^2 + (p-1) S v, which is kept as
// a residual cross-check of the u-form solver, not a second solver.

#include <deque>

#include "pmeflow/flow.hpp"

namespace pmeflow {

/// v = p/(p-1) u^{p-1}; PositivityError if u is not strictly positive.
ScalarField to_pressure(const ScalarField& u, double p);

struct PMESnapshot {
    double t = 0.0;
    Geometry geom;
    std::optional<ScalarField> f;
    ScalarField u;
};

class PMEState {
public:
    static PMEState init(FlowState flow, ScalarField u0, double p);

    double t() const { return ring_.back().t; }
    double p() const { return p_; }
    const ScalarField& u() const { return ring_.back().u; }
    const Geometry& geom() const { return ring_.back().geom; }
    FlowState flow() const {
        return FlowState{ring_.back().t, ring_.back().geom, ring_.back().f};
    }
    /// last up-to-3 accepted snapshots, oldest first; back() is current
    const std::deque<PMESnapshot>& ring() const { return ring_; }

    friend PMEState pme_step(const PMEState&, const FlowKind&, double, StepInfo*);

private:
    PMEState() = default;
    double p_ = 2.0;
    std::deque<PMESnapshot> ring_;
};

PMEState pme_step(const PMEState& state, const FlowKind& kind, double dt,
                  StepInfo* info = nullptr);

/// v_t - (p-1) v Lap v - |grad v|^2 - (p-1) S v at the middle ring snapshot
/// (centered v_t); needs a full, equally spaced ring.
ScalarField v_form_residual(const PMEState& state, const FlowKind& kind);

/// Integral of u against the current metric's measure.
double mass(const PMEState& state);

struct Extrema {
    double v_min, v_max, u_min, u_max;
};
Extrema extrema(const PMEState& state);

} // namespace pmeflow
