#include "pmeflow/geometry.hpp"

#include <cmath>

namespace pmeflow {

Geometry Geometry::circle(ScalarField phi) {
    if (phi.grid().dim != 1)
        throw ConfigError("Circle1D needs a 1D grid");
    if (phi.min() <= 0.0)
        throw ConfigError("Circle1D conformal factor phi must be strictly positive");
    Circle1D c{std::move(phi), {}, {}};
    int N = c.phi.size();
    c.g11.resize(N);
    c.inv_g11.resize(N);
    for (int i = 0; i < N; ++i) {
        c.g11[i] = c.phi[i] * c.phi[i];
        c.inv_g11[i] = 1.0 / c.g11[i];
    }
    return Geometry(std::move(c));
}

Geometry Geometry::torus(ScalarField w) {
    if (w.grid().dim != 2)
        throw ConfigError("ConformalTorus2D needs a 2D grid");
    if (!w.all_finite())
        throw ConfigError("ConformalTorus2D conformal exponent w must be finite");
    ConformalTorus2D t{std::move(w), {}, {}};
    int N = t.w.size();
    t.e2w.resize(N);
    t.em2w.resize(N);
    for (int i = 0; i < N; ++i) {
        t.e2w[i] = std::exp(2.0 * t.w[i]);
        t.em2w[i] = 1.0 / t.e2w[i];
    }
    return Geometry(std::move(t));
}

Geometry Geometry::sphere(int n, double r2) {
    if (n < 2) throw ConfigError("RoundSphere dimension must be >= 2");
    if (r2 <= 0.0) throw ConfigError("RoundSphere needs r^2 > 0");
    return Geometry(RoundSphere{n, r2});
}

Geometry::Backend Geometry::backend() const {
    if (std::holds_alternative<Circle1D>(backend_)) return Backend::Circle1D;
    if (std::holds_alternative<ConformalTorus2D>(backend_)) return Backend::ConformalTorus2D;
    return Backend::RoundSphere;
}

int Geometry::dimension() const {
    switch (backend()) {
    case Backend::Circle1D: return 1;
    case Backend::ConformalTorus2D: return 2;
    default: return sphere_n();
    }
}

const GridSpec& Geometry::grid() const {
    if (auto* c = std::get_if<Circle1D>(&backend_)) return c->phi.grid();
    if (auto* t = std::get_if<ConformalTorus2D>(&backend_)) return t->w.grid();
    throw BackendError("RoundSphere is analytic: no grid");
}

const ScalarField& Geometry::phi() const {
    if (auto* c = std::get_if<Circle1D>(&backend_)) return c->phi;
    throw BackendError("phi only exists on the Circle1D backend");
}

const ScalarField& Geometry::w() const {
    if (auto* t = std::get_if<ConformalTorus2D>(&backend_)) return t->w;
    throw BackendError("w only exists on the ConformalTorus2D backend");
}

int Geometry::sphere_n() const {
    if (auto* s = std::get_if<RoundSphere>(&backend_)) return s->n;
    throw BackendError("sphere_n only exists on the RoundSphere backend");
}

double Geometry::sphere_r2() const {
    if (auto* s = std::get_if<RoundSphere>(&backend_)) return s->r2;
    throw BackendError("sphere_r2 only exists on the RoundSphere backend");
}

double Geometry::sphere_area() const {
    // |S^n_r| = 2 pi^((n+1)/2) / Gamma((n+1)/2) * r^n
    int n = sphere_n();
    double r = std::sqrt(sphere_r2());
    double half = 0.5 * (n + 1);
    return 2.0 * std::pow(M_PI, half) / std::tgamma(half) * std::pow(r, n);
}

std::array<double, 3> Geometry::metric(int node) const {
    if (auto* c = std::get_if<Circle1D>(&backend_)) return {c->g11[node], 0.0, 0.0};
    if (auto* t = std::get_if<ConformalTorus2D>(&backend_)) {
        double e = t->e2w[node];
        return {e, 0.0, e};
    }
    throw BackendError("metric components are grid-backend only");
}

std::array<double, 3> Geometry::inv_metric(int node) const {
    if (auto* c = std::get_if<Circle1D>(&backend_)) return {c->inv_g11[node], 0.0, 0.0};
    if (auto* t = std::get_if<ConformalTorus2D>(&backend_)) {
        double e = t->em2w[node];
        return {e, 0.0, e};
    }
    throw BackendError("metric components are grid-backend only");
}

double Geometry::sqrt_det(int node) const {
    if (auto* c = std::get_if<Circle1D>(&backend_)) return c->phi[node];
    if (auto* t = std::get_if<ConformalTorus2D>(&backend_)) return t->e2w[node];
    throw BackendError("sqrt_det is grid-backend only");
}

const std::vector<double>& Geometry::conformal_factor() const {
    if (auto* c = std::get_if<Circle1D>(&backend_)) return c->g11;
    if (auto* t = std::get_if<ConformalTorus2D>(&backend_)) return t->e2w;
    throw BackendError("conformal factors are grid-backend only");
}

const std::vector<double>& Geometry::inv_conformal_factor() const {
    if (auto* c = std::get_if<Circle1D>(&backend_)) return c->inv_g11;
    if (auto* t = std::get_if<ConformalTorus2D>(&backend_)) return t->em2w;
    throw BackendError("conformal factors are grid-backend only");
}

const char* Geometry::backend_name() const {
    switch (backend()) {
    case Backend::Circle1D: return "Circle1D";
    case Backend::ConformalTorus2D: return "ConformalTorus2D";
    default: return "RoundSphere";
    }
}

} // namespace pmeflow
