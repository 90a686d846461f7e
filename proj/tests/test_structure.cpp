#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pmeflow/runner.hpp"
#include "pmeflow/structure.hpp"
#include "support.hpp"

using namespace pmeflow;
using pmeflow::test::make_field;

namespace {

// three consecutive flow snapshots (no PME) for the time-derivative stencils
Run flow_triple(Geometry geom, std::optional<ScalarField> f, FlowKind kind, double dt,
                int steps_before = 4) {
    return record_window(FlowState{0.0, std::move(geom), std::move(f)}, std::nullopt, 2.0,
                         kind, dt, steps_before, 3);
}

VectorField direction(const GridSpec& g, double cx, double cy) {
    VectorField X(g, g.dim);
    for (int node = 0; node < g.node_count(); ++node) {
        X.at(0, node) = cx;
        if (g.dim == 2) X.at(1, node) = cy;
    }
    return X;
}

} // namespace

TEST_CASE("quantity_I closed forms") {
    // Ricci: I vanishes identically
    GridSpec g = GridSpec::torus(32, 32, 1.0, 1.0);
    Geometry curved = Geometry::torus(make_field(g, [](double x, double y) {
        return 0.08 * std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
    }));
    VectorField X = direction(g, 0.7, -0.4);
    CHECK(quantity_I(FlowState{0.0, curved, {}}, FlowKind::ricci(), X).max_abs() == 0.0);

    // static: I = Ric(X, X)
    ScalarField I = quantity_I(FlowState{0.0, curved, {}}, FlowKind::static_(), X);
    ScalarField ric_xx = tensor_contract(ricci(curved), X, X);
    for (int node = 0; node < g.node_count(); node += 61)
        CHECK(I[node] == doctest::Approx(ric_xx[node]));

    // List: I = 2 (grad_X f)^2 >= 0
    GridSpec gc = GridSpec::circle(128, 1.0);
    FlowState circ{0.0, Geometry::circle(ScalarField(gc, 1.0)),
                   make_field(gc, [](double x, double) { return 0.4 * std::sin(2 * M_PI * x); })};
    VectorField Xc = direction(gc, 0.9, 0.0);
    ScalarField Il = quantity_I(circ, FlowKind::list_extended(), Xc);
    ScalarField df = partial_derivative(*circ.f, 0);
    for (int i = 0; i < 128; i += 17) {
        double xf = 0.9 * df[i];
        CHECK(Il[i] == doctest::Approx(2.0 * xf * xf));
        CHECK(Il[i] >= 0.0);
    }

    // quadratic in X: I(S, cX) = c^2 I(S, X) exactly
    VectorField X3 = direction(gc, 2.7, 0.0);
    ScalarField I3 = quantity_I(circ, FlowKind::list_extended(), X3);
    for (int i = 0; i < 128; i += 17)
        CHECK(I3[i] == doctest::Approx(Il[i] * (2.7 / 0.9) * (2.7 / 0.9)));
}

TEST_CASE("quantity_H closed forms") {
    // static: H = 0
    GridSpec g = GridSpec::torus(16, 16, 1.0, 1.0);
    Run st = flow_triple(Geometry::torus(ScalarField(g)), std::nullopt, FlowKind::static_(),
                         0.01);
    VectorField X = direction(g, 1.0, 0.5);
    CHECK(quantity_H(st.flow_state(0), st.flow_state(1), st.flow_state(2), st.kind, X)
              .max_abs() < 1e-14);

    // scaled identity, X = 0: H = n lambda / t
    double lam = 0.7;
    Run si = flow_triple(Geometry::torus(ScalarField(g)), std::nullopt,
                         FlowKind::scaled_identity(TimeTable(lam)), 0.01);
    VectorField zero(g, 2);
    double t_mid = si.snaps[1].t;
    ScalarField H = quantity_H(si.flow_state(0), si.flow_state(1), si.flow_state(2),
                               si.kind, zero);
    CHECK(H.max() == doctest::Approx(2 * lam / t_mid).epsilon(1e-10));

    // Ricci sphere, X = 0: H = dR/dt + R/t with R(t) = 2/(r0^2 - 2t)
    Run sph = flow_triple(Geometry::sphere(2, 1.0), std::nullopt, FlowKind::ricci(), 1e-3);
    VectorField zero_s(GridSpec::homogeneous(), 1);
    ScalarField Hs = quantity_H(sph.flow_state(0), sph.flow_state(1), sph.flow_state(2),
                                sph.kind, zero_s);
    double tm = sph.snaps[1].t;
    double r2 = 1.0 - 2.0 * tm;
    CHECK(Hs[0] == doctest::Approx(4.0 / (r2 * r2) + (2.0 / r2) / tm).epsilon(1e-5));

    // t = 0 is rejected
    Run early = flow_triple(Geometry::torus(ScalarField(g)), std::nullopt,
                            FlowKind::static_(), 0.01, 0);
    CHECK(early.snaps[0].t == 0.0);
    // build a fake triple centered at t = 0 by shifting times
    Run shifted = early;
    shifted.snaps[0].t = -0.01;
    shifted.snaps[1].t = 0.0;
    shifted.snaps[2].t = 0.01;
    CHECK_THROWS_AS(quantity_H(shifted.flow_state(0), shifted.flow_state(1),
                               shifted.flow_state(2), shifted.kind, X),
                    ConfigError);
}

TEST_CASE("quantity_D closed forms") {
    GridSpec g = GridSpec::torus(16, 16, 1.0, 1.0);
    Run st = flow_triple(Geometry::torus(ScalarField(g)), std::nullopt, FlowKind::static_(),
                         0.01);
    CHECK(quantity_D(st.flow_state(0), st.flow_state(1), st.flow_state(2), st.kind)
              .max_abs() == 0.0);

    // Ricci on the curved torus: D -> 0 under refinement
    auto ricci_D = [&](int n) {
        GridSpec gg = GridSpec::torus(n, n, 1.0, 1.0);
        Geometry geom = Geometry::torus(make_field(gg, [](double x, double y) {
            return 0.08 * std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
        }));
        double dt = 0.05 / (n * n);
        Run run = flow_triple(geom, std::nullopt, FlowKind::ricci(), dt);
        return quantity_D(run.flow_state(0), run.flow_state(1), run.flow_state(2), run.kind)
            .max_abs();
    };
    CHECK(ricci_D(32) / ricci_D(64) > 3.0);

    // List: D = 4 |Lap f|^2
    GridSpec gc = GridSpec::circle(256, 1.0);
    ScalarField f0 = make_field(gc, [](double x, double) { return 0.4 * std::sin(2 * M_PI * x); });
    Run li = flow_triple(Geometry::circle(ScalarField(gc, 1.0)), f0,
                         FlowKind::list_extended(), 1e-7);
    ScalarField D = quantity_D(li.flow_state(0), li.flow_state(1), li.flow_state(2), li.kind);
    ScalarField lap_f = laplace_beltrami(li.snaps[1].geom, *li.snaps[1].f);
    double scale = D.max_abs();
    for (int i = 0; i < 256; i += 31)
        CHECK(std::abs(D[i] - 4.0 * lap_f[i] * lap_f[i]) < 2e-3 * scale);
}

TEST_CASE("divergence gap closed forms") {
    GridSpec g = GridSpec::torus(32, 32, 1.0, 1.0);
    Geometry curved = Geometry::torus(make_field(g, [](double x, double y) {
        return 0.08 * std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
    }));
    FlowState st{0.0, curved, {}};
    CHECK(divergence_gap(st, FlowKind::static_()).raw() ==
          std::vector<double>(2 * g.node_count(), 0.0));

    // contracted second Bianchi: the gap of the Ricci kind converges to zero
    auto bianchi = [&](int n) {
        GridSpec gg = GridSpec::torus(n, n, 1.0, 1.0);
        Geometry geom = Geometry::torus(make_field(gg, [](double x, double y) {
            return 0.08 * std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
        }));
        VectorField gap = divergence_gap(FlowState{0.0, geom, {}}, FlowKind::ricci());
        double worst = 0.0;
        for (int c = 0; c < 2; ++c)
            for (int node = 0; node < gg.node_count(); ++node)
                worst = std::max(worst, std::abs(gap.at(c, node)));
        return worst;
    };
    CHECK(bianchi(32) / bianchi(64) > 3.4);

    // List on the circle: raised gap = -4 Lap f grad^1 f
    GridSpec gc = GridSpec::circle(256, 1.0);
    FlowState circ{0.0, Geometry::circle(ScalarField(gc, 1.0)),
                   make_field(gc, [](double x, double) { return 0.4 * std::sin(2 * M_PI * x); })};
    VectorField gap = divergence_gap(circ, FlowKind::list_extended());
    ScalarField lap_f = laplace_beltrami(circ.geom, *circ.f);
    VectorField grad_f = gradient(circ.geom, *circ.f);
    double scale = 0.0;
    for (int i = 0; i < 256; ++i) scale = std::max(scale, std::abs(gap.at(0, i)));
    for (int i = 0; i < 256; i += 29)
        CHECK(std::abs(gap.at(0, i) + 4.0 * lap_f[i] * grad_f.at(0, i)) < 5e-3 * scale);
}

TEST_CASE("quantity_E closed forms and E_b") {
    // Ricci: E ~ 0
    auto ricci_E = [&](int n) {
        GridSpec gg = GridSpec::torus(n, n, 1.0, 1.0);
        Geometry geom = Geometry::torus(make_field(gg, [](double x, double y) {
            return 0.08 * std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
        }));
        double dt = 0.05 / (n * n);
        Run run = flow_triple(geom, std::nullopt, FlowKind::ricci(), dt);
        VectorField X = direction(gg, 0.6, -0.8);
        return quantity_E(run.flow_state(0), run.flow_state(1), run.flow_state(2), run.kind, X)
            .max_abs();
    };
    CHECK(ricci_E(32) / ricci_E(64) > 3.0);

    // List: E = 4 |Lap f - grad_X f|^2; harmonic adds -alpha' |grad f|^2
    GridSpec gc = GridSpec::circle(256, 1.0);
    ScalarField f0 = make_field(gc, [](double x, double) { return 0.4 * std::sin(2 * M_PI * x); });
    VectorField X = direction(gc, 0.7, 0.0);
    {
        Run li = flow_triple(Geometry::circle(ScalarField(gc, 1.0)), f0,
                             FlowKind::list_extended(), 1e-7);
        ScalarField E =
            quantity_E(li.flow_state(0), li.flow_state(1), li.flow_state(2), li.kind, X);
        ScalarField lap_f = laplace_beltrami(li.snaps[1].geom, *li.snaps[1].f);
        ScalarField df = partial_derivative(*li.snaps[1].f, 0);
        double scale = E.max_abs();
        for (int i = 0; i < 256; i += 23) {
            double diff = lap_f[i] - 0.7 * df[i];
            CHECK(std::abs(E[i] - 4.0 * diff * diff) < 5e-3 * scale);
            CHECK(E[i] > -1e-9 * scale);
        }
    }
    {
        FlowKind hk = FlowKind::harmonic(TimeTable({0.0, 1.0}, {2.0, 1.0})); // alpha' = -1
        Run hm = flow_triple(Geometry::circle(ScalarField(gc, 1.0)), f0, hk, 1e-5);
        ScalarField E =
            quantity_E(hm.flow_state(0), hm.flow_state(1), hm.flow_state(2), hm.kind, X);
        const Geometry& geom = hm.snaps[1].geom;
        double alpha = hk.alpha(hm.snaps[1].t);
        ScalarField lap_f = laplace_beltrami(geom, *hm.snaps[1].f);
        ScalarField df = partial_derivative(*hm.snaps[1].f, 0);
        ScalarField q = vector_norm_sq(geom, gradient(geom, *hm.snaps[1].f));
        double scale = E.max_abs();
        for (int i = 0; i < 256; i += 23) {
            double diff = lap_f[i] - 0.7 * df[i];
            double closed = 2.0 * alpha * diff * diff + 1.0 * q[i]; // -alpha' = +1
            CHECK(std::abs(E[i] - closed) < 5e-3 * scale);
        }
    }

    // E_b at b = 2 is E exactly; b < 2 is rejected
    GridSpec g = GridSpec::torus(16, 16, 1.0, 1.0);
    Run si = flow_triple(Geometry::torus(ScalarField(g)), std::nullopt,
                         FlowKind::scaled_identity(TimeTable(0.4)), 0.01);
    VectorField Xt = direction(g, 1.0, 2.0);
    ScalarField E = quantity_E(si.flow_state(0), si.flow_state(1), si.flow_state(2), si.kind, Xt);
    ScalarField Eb =
        quantity_Eb(si.flow_state(0), si.flow_state(1), si.flow_state(2), si.kind, Xt, 2.0);
    for (int node = 0; node < g.node_count(); node += 41) CHECK(E[node] == Eb[node]);
    CHECK_THROWS_AS(quantity_Eb(si.flow_state(0), si.flow_state(1), si.flow_state(2),
                                si.kind, Xt, 1.5),
                    ConfigError);
}

TEST_CASE("check_hypotheses") {
    // static flat torus with PME data: everything passes with zero bounds
    GridSpec g = GridSpec::torus(16, 16, 1.0, 1.0);
    ScalarField u0 = make_field(g, [](double x, double y) {
        return 1.0 + 0.2 * std::sin(2 * M_PI * x) * std::sin(2 * M_PI * y);
    });
    Run st = record_window(FlowState{0.0, Geometry::torus(ScalarField(g)), {}}, u0, 2.0,
                           FlowKind::static_(), 1e-4, 2, 5);
    XSampleStrategy strat;
    HypothesisReport rep = check_hypotheses(st, 2.0, strat);
    CHECK(rep.all_ok());
    CHECK(rep.k.k1 == 0.0);
    CHECK(rep.k.k2 == 0.0);
    CHECK(rep.k.k3 == 0.0);
    CHECK(rep.x_samples > 10);

    // Ricci sphere: S = R > 0 and H >= 0 on the sampled family
    Run sph = record_window(FlowState{0.0, Geometry::sphere(2, 1.0), {}}, std::nullopt, 2.0,
                            FlowKind::ricci(), 1e-3, 2, 5);
    HypothesisReport rs = check_hypotheses(sph, 2.0, strat);
    CHECK(rs.s_ok);
    CHECK(rs.h_ok);
    CHECK(rs.min_S > 0.0);

    // scaled identity with lambda = -1: S = -n < 0 fails the sign hypothesis
    Run neg = record_window(FlowState{0.0, Geometry::torus(ScalarField(g)), {}}, u0, 2.0,
                            FlowKind::scaled_identity(TimeTable(-1.0)), 1e-4, 2, 5);
    HypothesisReport rn = check_hypotheses(neg, 2.0, strat);
    CHECK(!rn.s_ok);
    CHECK(rn.min_S == doctest::Approx(-2.0));
}
