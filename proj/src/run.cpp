#include "pmeflow/run.hpp"

#include <cmath>

namespace pmeflow {

double Run::snap_dt() const {
    if (snaps.size() < 2) throw ConfigError("run has fewer than two snapshots");
    return snaps[1].t - snaps[0].t;
}

ScalarField Run::pressure(size_t i) const {
    if (!snaps[i].u) throw ConfigError("run carries no density field");
    return to_pressure(*snaps[i].u, p);
}

Run record_run(const FlowState& init, const std::optional<ScalarField>& u0, double p,
               const FlowKind& kind, double dt, int steps, int stride) {
    if (stride < 1 || steps < 0) throw ConfigError("record_run: bad steps/stride");
    check_kind_backend(kind, init.geom);
    Run run;
    run.kind = kind;
    run.p = p;

    detail::CoupledState s{init.t, init.geom, init.f, u0, p};
    run.snaps.push_back(RunSnapshot{s.t, s.geom, s.f, s.u});
    int substeps = 0;
    for (int k = 1; k <= steps; ++k) {
        s = detail::advance(s, kind, dt, substeps);
        if (k % stride == 0)
            run.snaps.push_back(RunSnapshot{s.t, s.geom, s.f, s.u});
    }
    return run;
}

PressureView pressure_view(const Run& run, size_t i) {
    size_t n = run.size();
    if (n < 3) throw ConfigError("pressure_view needs at least three snapshots");
    if (i >= n) throw ConfigError("pressure_view: snapshot index out of range");
    double dt = run.snap_dt();

    PressureView pv;
    pv.t = run.snaps[i].t;
    pv.v = run.pressure(i);

    ScalarField vt(pv.v.grid());
    int N = pv.v.size();
    if (i == 0) {
        ScalarField v1 = run.pressure(1), v2 = run.pressure(2);
        for (int k = 0; k < N; ++k)
            vt[k] = (-3.0 * pv.v[k] + 4.0 * v1[k] - v2[k]) / (2.0 * dt);
    } else if (i == n - 1) {
        ScalarField v1 = run.pressure(n - 2), v2 = run.pressure(n - 3);
        for (int k = 0; k < N; ++k)
            vt[k] = (3.0 * pv.v[k] - 4.0 * v1[k] + v2[k]) / (2.0 * dt);
    } else {
        ScalarField vm = run.pressure(i - 1), vp = run.pressure(i + 1);
        for (int k = 0; k < N; ++k) vt[k] = (vp[k] - vm[k]) / (2.0 * dt);
    }
    pv.v_t = std::move(vt);

    const Geometry& geom = run.snaps[i].geom;
    if (geom.is_grid()) {
        pv.grad_v = gradient(geom, pv.v);
        pv.grad_v_sq = vector_norm_sq(geom, pv.grad_v);
        pv.lap_v = laplace_beltrami(geom, pv.v);
    } else {
        pv.grad_v = VectorField(GridSpec::homogeneous(), 1);
        pv.grad_v_sq = ScalarField(GridSpec::homogeneous());
        pv.lap_v = ScalarField(GridSpec::homogeneous());
    }
    return pv;
}

} // namespace pmeflow
