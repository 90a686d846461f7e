#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pmeflow/distance.hpp"
#include "pmeflow/operators.hpp"
#include "support.hpp"

using namespace pmeflow;
using pmeflow::test::make_field;

namespace {

Geometry sine_torus(int n, double eps) {
    GridSpec g = GridSpec::torus(n, n, 1.0, 1.0);
    return Geometry::torus(make_field(g, [&](double x, double y) {
        return eps * std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
    }));
}

ScalarField random_smooth(const GridSpec& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double a1 = unif(rng), a2 = unif(rng), a3 = unif(rng), a4 = unif(rng);
    return make_field(g, [&](double x, double y) {
        return a1 * std::sin(2 * M_PI * x) + a2 * std::cos(2 * M_PI * (x + y)) +
               a3 * std::sin(4 * M_PI * y) + a4 * std::cos(2 * M_PI * x) * std::sin(2 * M_PI * y);
    });
}

} // namespace

TEST_CASE("christoffel vanishes on flat and constant metrics") {
    GridSpec g = GridSpec::torus(16, 16, 1.0, 1.0);
    ChristoffelField flat = christoffel(Geometry::torus(ScalarField(g)));
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int node = 0; node < g.node_count(); ++node)
                    CHECK(flat.at(k, i, j, node) == 0.0);

    GridSpec gc = GridSpec::circle(32, 1.0);
    ChristoffelField circ = christoffel(Geometry::circle(ScalarField(gc, 1.7)));
    CHECK(std::abs(circ.at(0, 0, 0, 5)) < 1e-14);
}

TEST_CASE("christoffel matches the conformal closed form at O(h^2)") {
    double eps = 0.05;
    auto closed_form_err = [&](int n) {
        Geometry geom = sine_torus(n, eps);
        const GridSpec& g = geom.grid();
        ChristoffelField gamma = christoffel(geom);
        double worst = 0.0;
        for (int node = 0; node < g.node_count(); ++node) {
            auto xy = g.coords(node);
            double x = xy[0] * g.spacing(0), y = xy[1] * g.spacing(1);
            double wx = eps * 2 * M_PI * std::cos(2 * M_PI * x) * std::cos(2 * M_PI * y);
            double wy = -eps * 2 * M_PI * std::sin(2 * M_PI * x) * std::sin(2 * M_PI * y);
            worst = std::max(worst, std::abs(gamma.at(0, 0, 0, node) - wx));
            worst = std::max(worst, std::abs(gamma.at(0, 0, 1, node) - wy));
            worst = std::max(worst, std::abs(gamma.at(0, 1, 1, node) + wx));
            worst = std::max(worst, std::abs(gamma.at(1, 0, 0, node) + wy));
            worst = std::max(worst, std::abs(gamma.at(1, 0, 1, node) - wx));
            worst = std::max(worst, std::abs(gamma.at(1, 1, 1, node) - wy));
        }
        return worst;
    };
    double e32 = closed_form_err(32), e64 = closed_form_err(64);
    CHECK(e32 / e64 > 3.5); // second order
    CHECK(e64 < 1e-3);
}

TEST_CASE("gradient basics") {
    GridSpec g = GridSpec::torus(64, 64, 1.0, 1.0);
    Geometry flat = Geometry::torus(ScalarField(g));

    VectorField zg = gradient(flat, ScalarField(g, 3.14));
    CHECK(zg.raw() == std::vector<double>(2 * g.node_count(), 0.0));

    ScalarField f = make_field(g, [](double x, double) { return std::sin(2 * M_PI * x); });
    VectorField gf = gradient(flat, f);
    double worst = 0.0;
    for (int node = 0; node < g.node_count(); ++node) {
        auto xy = g.coords(node);
        double x = xy[0] * g.spacing(0);
        worst = std::max(worst,
                         std::abs(gf.at(0, node) - 2 * M_PI * std::cos(2 * M_PI * x)));
        worst = std::max(worst, std::abs(gf.at(1, node)));
    }
    CHECK(worst < 2e-2); // O(h^2) at n = 64

    // constant conformal factor scales the inverse metric
    double c = 0.3;
    Geometry scaled = Geometry::torus(ScalarField(g, c));
    VectorField gs = gradient(scaled, f);
    for (int node = 0; node < g.node_count(); node += 97)
        CHECK(gs.at(0, node) == doctest::Approx(std::exp(-2 * c) * gf.at(0, node)));

    CHECK_THROWS_AS(gradient(Geometry::sphere(2, 1.0), ScalarField(GridSpec::homogeneous())),
                    BackendError);
}

TEST_CASE("laplacian: eigenfunction, exact constants, conservation") {
    GridSpec g = GridSpec::torus(64, 64, 1.0, 1.0);
    Geometry flat = Geometry::torus(ScalarField(g));

    ScalarField lc = laplace_beltrami(flat, ScalarField(g, 2.5));
    CHECK(lc.max_abs() == 0.0);

    ScalarField f = make_field(g, [](double x, double) { return std::sin(2 * M_PI * x); });
    ScalarField lap = laplace_beltrami(flat, f);
    double k2 = 4 * M_PI * M_PI;
    double worst = 0.0;
    for (int i = 0; i < g.node_count(); ++i) worst = std::max(worst, std::abs(lap[i] + k2 * f[i]));
    CHECK(worst < 0.05);

    // conservative form: the metric-weighted integral telescopes to zero
    for (unsigned seed : {1u, 2u, 3u}) {
        ScalarField r = random_smooth(g, seed);
        Geometry curved = sine_torus(64, 0.1);
        double integral = integrate(curved, laplace_beltrami(curved, r));
        CHECK(std::abs(integral) < 1e-12 * r.max_abs());
    }
    GridSpec gc = GridSpec::circle(64, 1.0);
    Geometry circ = Geometry::circle(make_field(gc, [](double x, double) {
        return 1.0 + 0.3 * std::sin(2 * M_PI * x);
    }));
    ScalarField rc = make_field(gc, [](double x, double) {
        return std::cos(2 * M_PI * x) + 0.5 * std::sin(4 * M_PI * x);
    });
    CHECK(std::abs(integrate(circ, laplace_beltrami(circ, rc))) < 1e-12);
}

TEST_CASE("hessian: flat second differences and trace consistency") {
    GridSpec g = GridSpec::torus(32, 32, 1.0, 1.0);
    Geometry flat = Geometry::torus(ScalarField(g));
    CHECK(hessian(flat, ScalarField(g, 1.0)).max_abs() == 0.0);

    ScalarField f = random_smooth(g, 7);
    SymTensorField H = hessian(flat, f);
    double h = g.spacing(0);
    for (int node = 0; node < g.node_count(); node += 53) {
        double dxx = (f[g.shift(node, 0, 1)] - 2 * f[node] + f[g.shift(node, 0, -1)]) / (h * h);
        CHECK(H.at(0, node) == doctest::Approx(dxx));
    }

    // on the conformal torus the two discretizations coincide exactly
    {
        Geometry geom = sine_torus(32, 0.08);
        ScalarField ff = random_smooth(geom.grid(), 5);
        SymTensorField hh = hessian(geom, ff);
        ScalarField lap = laplace_beltrami(geom, ff);
        double worst = 0.0;
        for (int node = 0; node < geom.node_count(); ++node) {
            auto gi = geom.inv_metric(node);
            double tr = gi[0] * hh.at(0, node) + 2 * gi[1] * hh.at(1, node) +
                        gi[2] * hh.at(2, node);
            worst = std::max(worst, std::abs(tr - lap[node]));
        }
        CHECK(worst < 1e-11);
    }
    // on the circle the flux form differs by a genuine O(h^2)
    auto trace_gap = [&](int n) {
        GridSpec gc = GridSpec::circle(n, 1.0);
        Geometry geom = Geometry::circle(make_field(gc, [](double x, double) {
            return 1.0 + 0.3 * std::sin(2 * M_PI * x);
        }));
        ScalarField ff = make_field(gc, [](double x, double) {
            return std::cos(2 * M_PI * x) + 0.4 * std::sin(4 * M_PI * x);
        });
        SymTensorField hh = hessian(geom, ff);
        ScalarField lap = laplace_beltrami(geom, ff);
        double worst = 0.0;
        for (int node = 0; node < n; ++node) {
            double tr = geom.inv_metric(node)[0] * hh.at(0, node);
            worst = std::max(worst, std::abs(tr - lap[node]));
        }
        return worst;
    };
    double t64 = trace_gap(64), t128 = trace_gap(128);
    CHECK(t64 / t128 > 3.4);
}

TEST_CASE("ricci and scalar curvature") {
    GridSpec g = GridSpec::torus(32, 32, 1.0, 1.0);
    CHECK(scalar_curvature(Geometry::torus(ScalarField(g))).max_abs() == 0.0);

    Geometry sph = Geometry::sphere(2, 1.0);
    CHECK(scalar_curvature(sph)[0] == doctest::Approx(2.0));
    CHECK(ricci(sph).at(0, 0) == doctest::Approx(1.0)); // coefficient of g

    // spectral oracle for the sine metric
    auto curv_err = [&](int n) {
        double eps = 0.05;
        Geometry geom = sine_torus(n, eps);
        ScalarField R = scalar_curvature(geom);
        double worst = 0.0;
        const GridSpec& gg = geom.grid();
        for (int node = 0; node < gg.node_count(); ++node) {
            auto xy = gg.coords(node);
            double x = xy[0] * gg.spacing(0), y = xy[1] * gg.spacing(1);
            double w = eps * std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
            double lap0w = -2.0 * 4 * M_PI * M_PI * w;
            worst = std::max(worst, std::abs(R[node] + 2 * std::exp(-2 * w) * lap0w));
        }
        return worst;
    };
    CHECK(curv_err(32) / curv_err(64) > 3.5);

    // the 2D identity R_ij = (R/2) g_ij holds by storage
    Geometry curved = sine_torus(24, 0.1);
    SymTensorField ric = ricci(curved);
    ScalarField R = scalar_curvature(curved);
    for (int node = 0; node < curved.node_count(); ++node) {
        auto m = curved.metric(node);
        CHECK(ric.at(0, node) == 0.5 * R[node] * m[0]);
        CHECK(ric.at(2, node) == 0.5 * R[node] * m[2]);
    }
}

TEST_CASE("integration") {
    GridSpec g = GridSpec::torus(32, 32, 2.0, 2.0);
    Geometry flat = Geometry::torus(ScalarField(g));
    CHECK(integrate(flat, ScalarField(g, 1.0)) == doctest::Approx(4.0));

    double c = 0.4;
    Geometry scaled = Geometry::torus(ScalarField(g, c));
    CHECK(integrate(scaled, ScalarField(g, 1.0)) ==
          doctest::Approx(std::exp(2 * c) * 4.0));

    ScalarField f = make_field(g, [](double x, double) {
        return 1.0 + std::sin(2 * M_PI * x / 2.0);
    });
    CHECK(integrate(flat, f) == doctest::Approx(4.0)); // periodic quadrature is exact

    CHECK(Geometry::sphere(2, 1.0).sphere_area() == doctest::Approx(4 * M_PI));
}

TEST_CASE("tensor norms") {
    Geometry geom = sine_torus(16, 0.1);
    const GridSpec& g = geom.grid();
    SymTensorField metric_tensor(g, 2), zero(g, 2), lam(g, 2);
    double lambda = -0.7;
    for (int node = 0; node < g.node_count(); ++node) {
        auto m = geom.metric(node);
        for (int comp = 0; comp < 3; ++comp) {
            metric_tensor.at(comp, node) = m[comp];
            lam.at(comp, node) = lambda * m[comp];
        }
    }
    ScalarField n_g = tensor_norm_sq(geom, metric_tensor);
    ScalarField n_0 = tensor_norm_sq(geom, zero);
    ScalarField n_l = tensor_norm_sq(geom, lam);
    for (int node = 0; node < g.node_count(); node += 17) {
        CHECK(n_g[node] == doctest::Approx(2.0));
        CHECK(n_0[node] == 0.0);
        CHECK(n_l[node] == doctest::Approx(2.0 * lambda * lambda));
    }
}

TEST_CASE("geodesic distance") {
    GridSpec gc = GridSpec::circle(128, 1.0);
    Geometry circ = Geometry::circle(ScalarField(gc, 1.0));
    ScalarField d = geodesic_distance(circ, 0);
    CHECK(d[0] == 0.0);
    CHECK(std::abs(d[64] - 0.5) < 1.0 / 128 + 1e-12); // antipodal on the unit circle

    GridSpec gt = GridSpec::torus(32, 32, 1.0, 1.0);
    Geometry torus = Geometry::torus(ScalarField(gt));
    ScalarField dt = geodesic_distance(torus, gt.index(4, 7));
    CHECK(dt[gt.index(12, 7)] == doctest::Approx(8.0 / 32).epsilon(0.05));
    CHECK(dt[gt.index(4, 1)] == doctest::Approx(6.0 / 32).epsilon(0.05)); // wraps

    // symmetry and triangle inequality on sampled nodes
    Geometry curved = sine_torus(24, 0.15);
    double h = curved.grid().spacing(0);
    int a = 5, b = 301, c = 411;
    ScalarField da = geodesic_distance(curved, a);
    ScalarField db = geodesic_distance(curved, b);
    CHECK(std::abs(da[b] - db[a]) < 1e-12);
    CHECK(da[c] <= da[b] + db[c] + 2 * h);
    CHECK_THROWS_AS(geodesic_distance(Geometry::sphere(2, 1.0), 0), BackendError);
}

TEST_CASE("bochner residual converges at order >= 1.8") {
    std::vector<double> hs, res;
    for (int n : {32, 64, 128}) {
        Geometry geom = sine_torus(n, 0.1);
        ScalarField f = make_field(geom.grid(), [](double x, double y) {
            return 0.3 * std::sin(2 * M_PI * x) * std::sin(2 * M_PI * y) +
                   0.2 * std::cos(2 * M_PI * y);
        });
        hs.push_back(geom.grid().spacing(0));
        res.push_back(bochner_residual(geom, f).max_abs());
    }
    double order =
        std::log(res[0] / res[2]) / std::log(hs[0] / hs[2]);
    CHECK(order > 1.8);
}
