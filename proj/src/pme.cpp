#include "pmeflow/pme.hpp"

#include <cmath>

namespace pmeflow {

ScalarField to_pressure(const ScalarField& u, double p) {
    if (!(p > 1.0)) throw ConfigError("PME exponent requires p > 1");
    ScalarField v(u.grid());
    int N = u.size();
    double c = p / (p - 1.0);
    for (int i = 0; i < N; ++i) {
        if (!(u[i] > 0.0)) throw PositivityError("to_pressure: u must be positive", i, 0.0);
        v[i] = p == 2.0 ? c * u[i] : c * std::pow(u[i], p - 1.0);
    }
    return v;
}

PMEState PMEState::init(FlowState flow, ScalarField u0, double p) {
    if (!(p > 1.0)) throw ConfigError("PME exponent requires p > 1");
    int N = u0.size();
    for (int i = 0; i < N; ++i)
        if (!(u0[i] > 0.0))
            throw PositivityError("initial density must be strictly positive", i, flow.t);
    if (flow.geom.is_grid() && !(u0.grid() == flow.geom.grid()))
        throw ConfigError("initial density grid does not match the geometry");
    PMEState s;
    s.p_ = p;
    s.ring_.push_back(PMESnapshot{flow.t, std::move(flow.geom), std::move(flow.f), std::move(u0)});
    return s;
}

PMEState pme_step(const PMEState& state, const FlowKind& kind, double dt, StepInfo* info) {
    const PMESnapshot& cur = state.ring_.back();
    check_kind_backend(kind, cur.geom);
    detail::CoupledState s{cur.t, cur.geom, cur.f, cur.u, state.p_};
    int substeps = 0;
    detail::CoupledState out = detail::advance(s, kind, dt, substeps);
    if (info) info->substeps = substeps;

    PMEState next;
    next.p_ = state.p_;
    next.ring_ = state.ring_;
    next.ring_.push_back(PMESnapshot{out.t, std::move(out.geom), std::move(out.f),
                                     std::move(*out.u)});
    while (next.ring_.size() > 3) next.ring_.pop_front();
    return next;
}

ScalarField v_form_residual(const PMEState& state, const FlowKind& kind) {
    const auto& ring = state.ring();
    if (ring.size() < 3)
        throw ConfigError("v_form_residual needs a full snapshot ring (3 steps)");
    double dt0 = ring[1].t - ring[0].t;
    double dt1 = ring[2].t - ring[1].t;
    if (std::abs(dt1 - dt0) > 1e-10 * std::max(dt0, dt1))
        throw ConfigError("v_form_residual needs equally spaced ring snapshots");

    double p = state.p();
    ScalarField v0 = to_pressure(ring[0].u, p);
    ScalarField v1 = to_pressure(ring[1].u, p);
    ScalarField v2 = to_pressure(ring[2].u, p);
    const Geometry& geom = ring[1].geom;

    ScalarField S = s_trace(FlowState{ring[1].t, geom, ring[1].f}, kind);
    ScalarField out(v1.grid());
    int N = v1.size();
    if (geom.is_grid()) {
        ScalarField lap_v = laplace_beltrami(geom, v1);
        ScalarField q = vector_norm_sq(geom, gradient(geom, v1));
        for (int i = 0; i < N; ++i) {
            double vt = (v2[i] - v0[i]) / (dt0 + dt1);
            out[i] = vt - (p - 1.0) * v1[i] * lap_v[i] - q[i] - (p - 1.0) * S[i] * v1[i];
        }
    } else {
        double vt = (v2[0] - v0[0]) / (dt0 + dt1);
        out[0] = vt - (p - 1.0) * S[0] * v1[0];
    }
    return out;
}

double mass(const PMEState& state) { return integrate(state.geom(), state.u()); }

Extrema extrema(const PMEState& state) {
    ScalarField v = to_pressure(state.u(), state.p());
    return Extrema{v.min(), v.max(), state.u().min(), state.u().max()};
}

} // namespace pmeflow
