#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pmeflow/flow.hpp"
#include "support.hpp"

using namespace pmeflow;
using pmeflow::test::make_field;

namespace {

FlowState unit_circle_state(int n, double t = 0.0) {
    GridSpec g = GridSpec::circle(n, 1.0);
    return FlowState{t, Geometry::circle(ScalarField(g, 1.0)), {}};
}

FlowState flat_torus_state(int n, double t = 0.0) {
    GridSpec g = GridSpec::torus(n, n, 1.0, 1.0);
    return FlowState{t, Geometry::torus(ScalarField(g)), {}};
}

} // namespace

TEST_CASE("s_tensor and s_trace per kind") {
    FlowState torus = flat_torus_state(16);
    CHECK(s_tensor(torus, FlowKind::static_()).max_abs() == 0.0);
    CHECK(s_trace(torus, FlowKind::static_()).max_abs() == 0.0);

    FlowKind si = FlowKind::scaled_identity(TimeTable(1.0));
    SymTensorField S = s_tensor(torus, si);
    for (int node = 0; node < 16; ++node) {
        CHECK(S.at(0, node) == doctest::Approx(1.0)); // S_ij = g_ij on the flat torus
        CHECK(S.at(1, node) == 0.0);
    }
    CHECK(s_trace(torus, si).max() == doctest::Approx(2.0));

    // circle with the harmonic kind: S_11 = -alpha f_x^2, S = S_11 / phi^2
    FlowState circle = unit_circle_state(128);
    circle.f = make_field(circle.geom.grid(),
                          [](double x, double) { return std::sin(2 * M_PI * x); });
    double alpha = 1.5;
    FlowKind hk = FlowKind::harmonic(TimeTable(alpha));
    SymTensorField Sh = s_tensor(circle, hk);
    ScalarField fx = partial_derivative(*circle.f, 0);
    for (int i = 0; i < 128; i += 13)
        CHECK(Sh.at(0, i) == doctest::Approx(-alpha * fx[i] * fx[i]));

    // List: S = R - 2 |grad f|^2 = -2 |grad f|^2 on the circle
    FlowKind list = FlowKind::list_extended();
    ScalarField St = s_trace(circle, list);
    ScalarField q = vector_norm_sq(circle.geom, gradient(circle.geom, *circle.f));
    for (int i = 0; i < 128; i += 13) CHECK(St[i] == doctest::Approx(-2.0 * q[i]));

    // sphere: Ricci trace is n(n-1)/r^2
    FlowState sph{0.0, Geometry::sphere(2, 1.0), {}};
    CHECK(s_trace(sph, FlowKind::ricci())[0] == doctest::Approx(2.0));
}

TEST_CASE("s_tensor contracted with the inverse metric equals s_trace") {
    FlowState circle = unit_circle_state(64);
    circle.f = make_field(circle.geom.grid(),
                          [](double x, double) { return 0.4 * std::sin(2 * M_PI * x); });
    for (FlowKind kind : {FlowKind::list_extended(), FlowKind::harmonic(TimeTable(0.7)),
                          FlowKind::scaled_identity(TimeTable(-0.3))}) {
        FlowState st = circle;
        if (!kind.needs_f()) st.f.reset();
        SymTensorField S = s_tensor(st, kind);
        ScalarField tr = s_trace(st, kind);
        for (int i = 0; i < 64; ++i) {
            auto gi = st.geom.inv_metric(i);
            CHECK(gi[0] * S.at(0, i) == doctest::Approx(tr[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("static step only advances time") {
    FlowState st = flat_torus_state(16);
    FlowState next = flow_step(st, FlowKind::static_(), 0.25);
    CHECK(next.t == doctest::Approx(0.25));
    CHECK(next.geom.w().max_abs() == 0.0);
}

TEST_CASE("scaled identity: w(t) = w(0) - lambda t exactly") {
    GridSpec g = GridSpec::torus(16, 16, 1.0, 1.0);
    FlowState st{0.0, Geometry::torus(make_field(g, [](double x, double) {
                     return 0.1 * std::sin(2 * M_PI * x);
                 })),
                 {}};
    double lam = 0.8, dt = 0.05;
    FlowKind kind = FlowKind::scaled_identity(TimeTable(lam));
    FlowState cur = st;
    for (int k = 0; k < 4; ++k) cur = flow_step(cur, kind, dt);
    for (int node = 0; node < g.node_count(); node += 37)
        CHECK(cur.geom.w()[node] ==
              doctest::Approx(st.geom.w()[node] - lam * 0.2).epsilon(1e-12));
}

TEST_CASE("shrinking round sphere and extinction") {
    FlowState st{0.0, Geometry::sphere(2, 1.0), {}};
    FlowKind kind = FlowKind::ricci();
    FlowState cur = st;
    for (int k = 0; k < 100; ++k) cur = flow_step(cur, kind, 1e-3);
    CHECK(std::abs(cur.geom.sphere_r2() - (1.0 - 2.0 * 0.1)) < 1e-12);

    // collapse at t = r2(0)/2 is reported, not clamped
    CHECK_THROWS_AS(flow_step(cur, kind, 1.0), ExtinctionError);
    try {
        flow_step(cur, kind, 1.0);
    } catch (const ExtinctionError& e) {
        CHECK(e.time > cur.t);
    }
}

TEST_CASE("ricci 2d satisfies dw/dt = -R/2 at integrator order") {
    auto residual = [&](double dt) {
        GridSpec g = GridSpec::torus(32, 32, 1.0, 1.0);
        FlowState st{0.0, Geometry::torus(make_field(g, [](double x, double y) {
                         return 0.05 * std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
                     })),
                     {}};
        FlowKind kind = FlowKind::ricci();
        FlowState a = flow_step(st, kind, dt);
        FlowState b = flow_step(a, kind, dt);
        ScalarField R = scalar_curvature(a.geom);
        double worst = 0.0;
        for (int node = 0; node < g.node_count(); ++node) {
            double dwdt = (b.geom.w()[node] - st.geom.w()[node]) / (2 * dt);
            worst = std::max(worst, std::abs(dwdt + 0.5 * R[node]));
        }
        return worst;
    };
    double r1 = residual(4e-5), r2 = residual(2e-5);
    CHECK(r1 / r2 > 3.0); // O(dt^2)
}

TEST_CASE("coupled heat map obeys the max principle") {
    FlowState st = unit_circle_state(64);
    st.f = make_field(st.geom.grid(),
                      [](double x, double) { return 0.5 * std::sin(2 * M_PI * x); });
    FlowKind kind = FlowKind::harmonic(TimeTable({0.0, 1.0}, {2.0, 1.0}));
    double fmax = st.f->max(), fmin = st.f->min();
    FlowState cur = st;
    for (int k = 0; k < 200; ++k) {
        cur = flow_step(cur, kind, 2e-5);
        CHECK(cur.f->max() <= fmax + 1e-8);
        CHECK(cur.f->min() >= fmin - 1e-8);
        fmax = cur.f->max();
        fmin = cur.f->min();
    }
}

TEST_CASE("CFL guard halves oversized steps and reports it") {
    FlowState st = unit_circle_state(64);
    st.f = make_field(st.geom.grid(),
                      [](double x, double) { return 0.5 * std::sin(2 * M_PI * x); });
    FlowKind kind = FlowKind::list_extended();
    StepInfo info;
    FlowState big = flow_step(st, kind, 2e-3, &info); // far above the f-heat limit
    CHECK(info.substeps > 1);

    FlowState fine = st;
    int n_fine = 64;
    for (int k = 0; k < n_fine; ++k) fine = flow_step(fine, kind, 2e-3 / n_fine);
    for (int i = 0; i < 64; i += 11)
        CHECK(big.f->operator[](i) == doctest::Approx(fine.f->operator[](i)).epsilon(1e-6));
}

TEST_CASE("s_time_derivative") {
    FlowState st = flat_torus_state(16);
    FlowKind si = FlowKind::scaled_identity(TimeTable(0.6));
    FlowState a = flow_step(st, si, 0.01);
    FlowState b = flow_step(a, si, 0.01);
    CHECK(s_time_derivative(st, b, si).max_abs() < 1e-10); // S = n lambda constant

    FlowState sph{0.0, Geometry::sphere(2, 4.0), {}};
    FlowKind ricci = FlowKind::ricci();
    FlowState sa = flow_step(sph, ricci, 1e-3);
    FlowState sb = flow_step(sa, ricci, 1e-3);
    double r2_mid = sa.geom.sphere_r2();
    double closed = 4.0 / (r2_mid * r2_mid); // d/dt [2/r^2] with r^2 linear in t
    CHECK(s_time_derivative(sph, sb, ricci)[0] == doctest::Approx(closed).epsilon(1e-5));
}

TEST_CASE("minimal_bounds") {
    FlowState flat = flat_torus_state(16);
    CurvatureBounds b0 = minimal_bounds(flat, FlowKind::static_());
    CHECK(b0.k1 == 0.0);
    CHECK(b0.k2 == 0.0);
    CHECK(b0.k3 == 0.0);

    FlowState sph{0.0, Geometry::sphere(2, 1.0), {}};
    CurvatureBounds bs = minimal_bounds(sph, FlowKind::ricci());
    CHECK(bs.k1 == 0.0);
    CHECK(bs.k2 == 0.0);
    CHECK(bs.k3 == doctest::Approx(1.0)); // Ric = g

    CurvatureBounds bn = minimal_bounds(flat, FlowKind::scaled_identity(TimeTable(-1.0)));
    CHECK(bn.k2 == doctest::Approx(1.0));
    CHECK(bn.k3 == 0.0);
}

TEST_CASE("kind/backend pairing is validated") {
    FlowState circle = unit_circle_state(16);
    CHECK_THROWS_AS(s_tensor(circle, FlowKind::ricci()), ConfigError);

    FlowState torus = flat_torus_state(16);
    FlowState torus_f = torus;
    torus_f.f = ScalarField(torus.geom.grid(), 0.1);
    CHECK_THROWS_AS(s_tensor(torus_f, FlowKind::list_extended()), ConfigError);

    // f presence must match the kind
    CHECK_THROWS_AS(s_tensor(circle, FlowKind::list_extended()), ConfigError);
    FlowState circle_f = circle;
    circle_f.f = ScalarField(circle.geom.grid(), 0.1);
    CHECK_THROWS_AS(s_tensor(circle_f, FlowKind::static_()), ConfigError);

    CHECK_THROWS_AS(FlowKind::harmonic(TimeTable({0.0, 1.0}, {1.0, 2.0})), ConfigError);
    CHECK_THROWS_AS(FlowKind::harmonic(TimeTable(-1.0)), ConfigError);
}
