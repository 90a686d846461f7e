#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmeflow/distance.hpp"
#include "pmeflow/harnack.hpp"
#include "pmeflow/runner.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace pmeflow;

namespace {

ScalarField make_field(const Geometry& geom, const std::vector<double>& values) {
    if (!geom.is_grid()) {
        ScalarField f(GridSpec::homogeneous());
        if (values.size() != 1) throw ConfigError("sphere fields hold a single value");
        f[0] = values[0];
        return f;
    }
    return ScalarField(geom.grid(), values);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "geometric flow + porous medium equation laboratory";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<BackendError>(m, "BackendError");
    py::register_exception<PositivityError>(m, "PositivityError");
    py::register_exception<ExtinctionError>(m, "ExtinctionError");

    py::class_<GridSpec>(m, "GridSpec")
        .def_static("circle", &GridSpec::circle, py::arg("n"), py::arg("length"))
        .def_static("torus", &GridSpec::torus, py::arg("nx"), py::arg("ny"), py::arg("lx"),
                    py::arg("ly"))
        .def_readonly("dim", &GridSpec::dim)
        .def_property_readonly("shape",
                               [](const GridSpec& g) {
                                   return g.dim == 1 ? std::vector<int>{g.n[0]}
                                                     : std::vector<int>{g.n[0], g.n[1]};
                               })
        .def("node_count", &GridSpec::node_count)
        .def("spacing", &GridSpec::spacing, py::arg("axis"));

    py::class_<Geometry>(m, "Geometry")
        .def_static("circle",
                    [](int n, double length, const std::vector<double>& phi) {
                        return Geometry::circle(
                            ScalarField(GridSpec::circle(n, length), phi));
                    },
                    py::arg("n"), py::arg("length"), py::arg("phi"))
        .def_static("flat_circle",
                    [](int n, double length) {
                        return Geometry::circle(
                            ScalarField(GridSpec::circle(n, length), 1.0));
                    },
                    py::arg("n"), py::arg("length"))
        .def_static("torus",
                    [](int nx, int ny, double lx, double ly, const std::vector<double>& w) {
                        return Geometry::torus(
                            ScalarField(GridSpec::torus(nx, ny, lx, ly), w));
                    },
                    py::arg("nx"), py::arg("ny"), py::arg("lx"), py::arg("ly"), py::arg("w"))
        .def_static("flat_torus",
                    [](int nx, int ny, double lx, double ly) {
                        return Geometry::torus(
                            ScalarField(GridSpec::torus(nx, ny, lx, ly), 0.0));
                    },
                    py::arg("nx"), py::arg("ny"), py::arg("lx"), py::arg("ly"))
        .def_static("sphere", &Geometry::sphere, py::arg("n"), py::arg("r2"))
        .def_property_readonly("backend", &Geometry::backend_name)
        .def_property_readonly("dimension", &Geometry::dimension)
        .def("node_count", &Geometry::node_count)
        .def("sphere_r2", &Geometry::sphere_r2)
        .def("sphere_area", &Geometry::sphere_area);

    py::class_<FlowKind>(m, "FlowKind")
        .def_static("static_", &FlowKind::static_)
        .def_static("ricci", &FlowKind::ricci)
        .def_static("scaled_identity",
                    [](double lam) { return FlowKind::scaled_identity(TimeTable(lam)); },
                    py::arg("lam"))
        .def_static("list_extended", &FlowKind::list_extended)
        .def_static("harmonic",
                    [](const std::vector<double>& t, const std::vector<double>& alpha) {
                        return FlowKind::harmonic(TimeTable(t, alpha));
                    },
                    py::arg("times"), py::arg("alpha"))
        .def_property_readonly("name", &FlowKind::name);

    py::class_<HarnackConfig>(m, "HarnackConfig")
        .def(py::init<>())
        .def_readwrite("b", &HarnackConfig::b)
        .def_readwrite("d", &HarnackConfig::d)
        .def_readwrite("rho", &HarnackConfig::rho)
        .def_readwrite("c1", &HarnackConfig::c1)
        .def_readwrite("c2", &HarnackConfig::c2)
        .def_readwrite("c3", &HarnackConfig::c3)
        .def_readwrite("c4", &HarnackConfig::c4)
        .def_readwrite("t_start", &HarnackConfig::t_start)
        .def_readwrite("tolerance", &HarnackConfig::tolerance)
        .def_readwrite("ball_mode", &HarnackConfig::ball_mode);

    m.def("laplace_beltrami",
          [](const Geometry& geom, const std::vector<double>& f) {
              return laplace_beltrami(geom, make_field(geom, f)).values();
          },
          py::arg("geom"), py::arg("f"));

    m.def("gradient",
          [](const Geometry& geom, const std::vector<double>& f) {
              return gradient(geom, make_field(geom, f)).raw();
          },
          py::arg("geom"), py::arg("f"),
          "contravariant components, component-major (X^0 block then X^1)");

    m.def("scalar_curvature",
          [](const Geometry& geom) { return scalar_curvature(geom).values(); },
          py::arg("geom"));

    m.def("integrate",
          [](const Geometry& geom, const std::vector<double>& f) {
              return integrate(geom, make_field(geom, f));
          },
          py::arg("geom"), py::arg("f"));

    m.def("geodesic_distance",
          [](const Geometry& geom, int source) {
              return geodesic_distance(geom, source).values();
          },
          py::arg("geom"), py::arg("source"));

    m.def("flow_step",
          [](const Geometry& geom, const FlowKind& kind, double t, double dt,
             std::optional<std::vector<double>> f) {
              std::optional<ScalarField> fs;
              if (f) fs = make_field(geom, *f);
              FlowState next = flow_step(FlowState{t, geom, fs}, kind, dt);
              py::dict out;
              out["t"] = next.t;
              out["geom"] = next.geom;
              if (next.f) out["f"] = next.f->values();
              return out;
          },
          py::arg("geom"), py::arg("kind"), py::arg("t"), py::arg("dt"),
          py::arg("f") = std::nullopt);

    m.def("simulate_pme",
          [](const Geometry& geom, const std::vector<double>& u0, double p,
             const FlowKind& kind, double dt, int steps, int stride,
             std::optional<std::vector<double>> f0) {
              std::optional<ScalarField> fs;
              if (f0) fs = make_field(geom, *f0);
              std::optional<ScalarField> u = make_field(geom, u0);
              Run run = record_run(FlowState{0.0, geom, fs}, u, p, kind, dt, steps, stride);
              std::vector<double> ts, masses, umin, umax;
              for (size_t i = 0; i < run.size(); ++i) {
                  ts.push_back(run.snaps[i].t);
                  masses.push_back(integrate(run.snaps[i].geom, *run.snaps[i].u));
                  umin.push_back(run.snaps[i].u->min());
                  umax.push_back(run.snaps[i].u->max());
              }
              py::dict out;
              out["t"] = ts;
              out["mass"] = masses;
              out["u_min"] = umin;
              out["u_max"] = umax;
              out["u_final"] = run.snaps.back().u->values();
              out["geom_final"] = run.snaps.back().geom;
              return out;
          },
          py::arg("geom"), py::arg("u0"), py::arg("p"), py::arg("kind"), py::arg("dt"),
          py::arg("steps"), py::arg("stride") = 1, py::arg("f0") = std::nullopt);

    m.def("harnack_f",
          [](const std::vector<double>& v, const std::vector<double>& v_t,
             const std::vector<double>& grad_v_sq, const std::vector<double>& S, double b,
             double d, double t) {
              if (!(t > 0.0)) throw ConfigError("harnack_f needs t > 0");
              std::vector<double> out(v.size());
              for (size_t i = 0; i < v.size(); ++i)
                  out[i] = grad_v_sq[i] / v[i] - b * v_t[i] / v[i] + (1.0 - b) * S[i] / v[i] -
                           d / t;
              return out;
          },
          py::arg("v"), py::arg("v_t"), py::arg("grad_v_sq"), py::arg("s"), py::arg("b"),
          py::arg("d"), py::arg("t"));

    m.def("theorem1_rhs",
          [](const HarnackConfig& cfg, double p, int n, double v_max, double k1, double k2,
             double k3) { return theorem1_rhs(cfg, p, n, v_max, CurvatureBounds{k1, k2, k3}); },
          py::arg("cfg"), py::arg("p"), py::arg("n"), py::arg("v_max"), py::arg("k1") = 0.0,
          py::arg("k2") = 0.0, py::arg("k3") = 0.0);

    m.def("proposition_rhs",
          [](const HarnackConfig& cfg, double p, int n, double v_max, double k1, double k2,
             double k3) {
              return proposition_rhs(cfg, p, n, v_max, CurvatureBounds{k1, k2, k3});
          },
          py::arg("cfg"), py::arg("p"), py::arg("n"), py::arg("v_max"), py::arg("k1") = 0.0,
          py::arg("k2") = 0.0, py::arg("k3") = 0.0);

    m.def("action_gamma_circle",
          [](int n, double length, const std::vector<double>& S, double t1, double t2,
             int slices, int x1, int x2) {
              if (slices < 1) throw ConfigError("slices must be >= 1");
              Geometry geom = Geometry::circle(ScalarField(GridSpec::circle(n, length), 1.0));
              ScalarField s_field(GridSpec::circle(n, length), S);
              std::vector<ActionSlice> sl;
              for (int k = 0; k <= slices; ++k) {
                  double t = t1 + (t2 - t1) * k / slices;
                  sl.push_back(ActionSlice{t, geom, s_field});
              }
              ActionPath path = action_gamma_slices(sl, x1, x2);
              py::dict out;
              out["gamma"] = path.gamma;
              out["nodes"] = path.nodes;
              out["times"] = path.times;
              return out;
          },
          py::arg("n"), py::arg("length"), py::arg("s"), py::arg("t1"), py::arg("t2"),
          py::arg("slices"), py::arg("x1"), py::arg("x2"),
          "lattice action on a flat circle with a static potential");

    m.def("flow_step_ricci_sphere",
          [](int n, double r2, double dt) {
              FlowState next =
                  flow_step(FlowState{0.0, Geometry::sphere(n, r2), {}}, FlowKind::ricci(), dt);
              return next.geom.sphere_r2();
          },
          py::arg("n"), py::arg("r2"), py::arg("dt"));

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "0.1.0";
#endif
}
