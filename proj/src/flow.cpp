#include "pmeflow/flow.hpp"

#include <cmath>
#include <sstream>

namespace pmeflow {

// ---------------------------------------------------------------- TimeTable

TimeTable::TimeTable(std::vector<double> times, std::vector<double> values)
    : t_(std::move(times)), v_(std::move(values)) {
    if (t_.empty() || t_.size() != v_.size())
        throw ConfigError("time table needs matching, nonempty samples");
    for (size_t i = 1; i < t_.size(); ++i)
        if (t_[i] <= t_[i - 1]) throw ConfigError("time table times must be increasing");
}

double TimeTable::operator()(double t) const {
    if (t <= t_.front()) return v_.front();
    if (t >= t_.back()) return v_.back();
    size_t i = 1;
    while (t_[i] < t) ++i;
    double s = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
    return v_[i - 1] + s * (v_[i] - v_[i - 1]);
}

bool TimeTable::positive_on_samples() const {
    for (double x : v_)
        if (x <= 0.0) return false;
    return true;
}

bool TimeTable::non_increasing_on_samples() const {
    for (size_t i = 1; i < v_.size(); ++i)
        if (v_[i] > v_[i - 1]) return false;
    return true;
}

TimeTable TimeTable::parse(const std::string& text) {
    if (text.find(':') == std::string::npos) {
        size_t pos = 0;
        double c = std::stod(text, &pos);
        if (pos != text.size()) throw ConfigError("bad table literal: " + text);
        return TimeTable(c);
    }
    std::vector<double> ts, vs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("bad table entry: " + item);
        ts.push_back(std::stod(item.substr(0, colon)));
        vs.push_back(std::stod(item.substr(colon + 1)));
    }
    return TimeTable(std::move(ts), std::move(vs));
}

std::string TimeTable::to_string() const {
    std::ostringstream os;
    for (size_t i = 0; i < t_.size(); ++i) {
        if (i) os << ',';
        os << t_[i] << ':' << v_[i];
    }
    return os.str();
}

// ----------------------------------------------------------------- FlowKind

FlowKind FlowKind::static_() { return FlowKind{FlowKindType::Static, {}, {}}; }
FlowKind FlowKind::ricci() { return FlowKind{FlowKindType::Ricci, {}, {}}; }

FlowKind FlowKind::scaled_identity(TimeTable lambda) {
    return FlowKind{FlowKindType::ScaledIdentity, std::move(lambda), {}};
}

FlowKind FlowKind::list_extended() {
    return FlowKind{FlowKindType::ListExtended, {}, TimeTable(2.0)};
}

FlowKind FlowKind::harmonic(TimeTable alpha) {
    if (!alpha.positive_on_samples())
        throw ConfigError("HarmonicScalar requires alpha(t) > 0 at every sample");
    if (!alpha.non_increasing_on_samples())
        throw ConfigError("HarmonicScalar requires alpha(t) non-increasing at the samples");
    return FlowKind{FlowKindType::HarmonicScalar, {}, std::move(alpha)};
}

double FlowKind::coupling(double t) const {
    switch (type) {
    case FlowKindType::ListExtended: return 2.0;
    case FlowKindType::HarmonicScalar: return alpha(t);
    default: return 0.0;
    }
}

const char* FlowKind::name() const {
    switch (type) {
    case FlowKindType::Static: return "static";
    case FlowKindType::Ricci: return "ricci";
    case FlowKindType::ScaledIdentity: return "scaled-identity";
    case FlowKindType::ListExtended: return "list";
    default: return "harmonic";
    }
}

void check_kind_backend(const FlowKind& kind, const Geometry& geom) {
    auto bad = [&] {
        throw ConfigError(std::string("flow kind '") + kind.name() +
                          "' is not defined on backend " + geom.backend_name());
    };
    switch (kind.type) {
    case FlowKindType::Ricci:
        if (geom.backend() == Geometry::Backend::Circle1D) bad();
        break;
    case FlowKindType::ListExtended:
    case FlowKindType::HarmonicScalar:
        if (geom.backend() != Geometry::Backend::Circle1D) bad();
        break;
    default:
        break;
    }
}

namespace {

void check_f_presence(const FlowKind& kind, const std::optional<ScalarField>& f) {
    if (kind.needs_f() && !f)
        throw ConfigError(std::string("flow kind '") + kind.name() +
                          "' needs the coupled scalar map f");
    if (!kind.needs_f() && f)
        throw ConfigError(std::string("flow kind '") + kind.name() +
                          "' does not take a scalar map f");
}

} // namespace

// --------------------------------------------------------- S tensor / trace

SymTensorField s_tensor(const FlowState& state, const FlowKind& kind) {
    check_kind_backend(kind, state.geom);
    check_f_presence(kind, state.f);
    const Geometry& geom = state.geom;

    if (!geom.is_grid()) {
        SymTensorField out(GridSpec::homogeneous(), 0); // coefficient of g
        switch (kind.type) {
        case FlowKindType::Static: break;
        case FlowKindType::ScaledIdentity: out.at(0, 0) = kind.lambda(state.t); break;
        case FlowKindType::Ricci:
            out.at(0, 0) = (geom.sphere_n() - 1) / geom.sphere_r2();
            break;
        default: break; // unreachable: checked above
        }
        return out;
    }

    const GridSpec& g = geom.grid();
    int dim = g.dim;
    int N = g.node_count();
    switch (kind.type) {
    case FlowKindType::Static:
        return SymTensorField(g, dim);
    case FlowKindType::ScaledIdentity: {
        SymTensorField out(g, dim);
        double lam = kind.lambda(state.t);
        for (int node = 0; node < N; ++node) {
            auto m = geom.metric(node);
            for (int c = 0; c < out.ncomp(); ++c) out.at(c, node) = lam * m[c];
        }
        return out;
    }
    case FlowKindType::Ricci:
        return ricci(geom);
    default: { // List / Harmonic on the circle: S_11 = -a (d_x f)^2
        SymTensorField out(g, dim);
        double a = kind.coupling(state.t);
        ScalarField fx = partial_derivative(*state.f, 0);
        for (int node = 0; node < N; ++node) out.at(0, node) = -a * fx[node] * fx[node];
        return out;
    }
    }
}

ScalarField s_trace(const FlowState& state, const FlowKind& kind) {
    SymTensorField S = s_tensor(state, kind);
    const Geometry& geom = state.geom;
    if (!geom.is_grid()) {
        ScalarField out(GridSpec::homogeneous());
        out[0] = geom.sphere_n() * S.at(0, 0);
        return out;
    }
    const GridSpec& g = geom.grid();
    int dim = g.dim;
    int N = g.node_count();
    ScalarField out(g);
    for (int node = 0; node < N; ++node) {
        auto gi = geom.inv_metric(node);
        double s = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                s += gi[SymTensorField::sym_index(i, j)] *
                     S.at(SymTensorField::sym_index(i, j), node);
        out[node] = s;
    }
    return out;
}

ScalarField s_conformal(const FlowState& state, const FlowKind& kind) {
    const Geometry& geom = state.geom;
    check_kind_backend(kind, geom);
    if (!geom.is_grid()) {
        SymTensorField S = s_tensor(state, kind);
        ScalarField out(GridSpec::homogeneous());
        out[0] = S.at(0, 0);
        return out;
    }
    if (geom.grid().dim == 1) {
        SymTensorField S = s_tensor(state, kind);
        const ScalarField& phi = geom.phi();
        ScalarField out(geom.grid());
        int N = out.size();
        for (int i = 0; i < N; ++i) out[i] = S.at(0, i) / (phi[i] * phi[i]);
        return out;
    }
    // 2D: only the conformal kinds are admitted
    switch (kind.type) {
    case FlowKindType::Static:
        return ScalarField(geom.grid(), 0.0);
    case FlowKindType::ScaledIdentity:
        return ScalarField(geom.grid(), kind.lambda(state.t));
    case FlowKindType::Ricci: {
        ScalarField R = scalar_curvature(geom);
        int N = R.size();
        for (int i = 0; i < N; ++i) R[i] *= 0.5;
        return R;
    }
    default:
        throw BackendError(std::string("S tensor of kind '") + kind.name() +
                           "' is not conformal on " + geom.backend_name());
    }
}

// ------------------------------------------------------------ time stepping

namespace detail {

namespace {

struct Rates {
    ScalarField metric;              // dw/dt (torus) or d(g11)/dt (circle)
    double r2 = 0.0;                 // d(r2)/dt (sphere)
    std::optional<ScalarField> f;    // df/dt
    std::optional<ScalarField> u;    // du/dt
};

Rates compute_rates(const CoupledState& s, const FlowKind& kind) {
    Rates r;
    FlowState fs{s.t, s.geom, s.f};
    const Geometry& geom = s.geom;

    if (!geom.is_grid()) {
        switch (kind.type) {
        case FlowKindType::Static: r.r2 = 0.0; break;
        case FlowKindType::Ricci: r.r2 = -2.0 * (geom.sphere_n() - 1); break;
        case FlowKindType::ScaledIdentity:
            r.r2 = -2.0 * kind.lambda(s.t) * geom.sphere_r2();
            break;
        default:
            throw ConfigError(std::string("flow kind '") + kind.name() +
                              "' is not defined on backend RoundSphere");
        }
    } else if (geom.grid().dim == 1) {
        SymTensorField S = s_tensor(fs, kind);
        ScalarField rate(geom.grid());
        int N = rate.size();
        for (int i = 0; i < N; ++i) rate[i] = -2.0 * S.at(0, i);
        r.metric = std::move(rate);
    } else {
        ScalarField sc = s_conformal(fs, kind);
        int N = sc.size();
        for (int i = 0; i < N; ++i) sc[i] = -sc[i];
        r.metric = std::move(sc);
    }

    if (s.f) r.f = laplace_beltrami(geom, *s.f);

    if (s.u) {
        ScalarField up(s.u->grid());
        int N = up.size();
        if (s.p == 2.0) {
            for (int i = 0; i < N; ++i) up[i] = (*s.u)[i] * (*s.u)[i];
        } else {
            for (int i = 0; i < N; ++i) up[i] = std::pow((*s.u)[i], s.p);
        }
        ScalarField rate = geom.is_grid() ? laplace_beltrami(geom, up)
                                          : ScalarField(GridSpec::homogeneous());
        ScalarField S = s_trace(fs, kind);
        for (int i = 0; i < rate.size(); ++i) rate[i] += S[i] * (*s.u)[i];
        r.u = std::move(rate);
    }
    return r;
}

CoupledState apply_rates(const CoupledState& base, const Rates& r, double dt, double t_new) {
    CoupledState out{t_new, base.geom, std::nullopt, std::nullopt, base.p};
    const Geometry& geom = base.geom;

    if (!geom.is_grid()) {
        double r2 = geom.sphere_r2() + dt * r.r2;
        if (r2 <= 0.0)
            throw ExtinctionError("round sphere collapsed (r^2 <= 0)", t_new);
        out.geom = Geometry::sphere(geom.sphere_n(), r2);
    } else if (geom.grid().dim == 1) {
        const ScalarField& phi = geom.phi();
        ScalarField phi_new(phi.grid());
        int N = phi.size();
        for (int i = 0; i < N; ++i) {
            double g11 = phi[i] * phi[i] + dt * r.metric[i];
            if (!(g11 > 0.0))
                throw ExtinctionError("circle metric degenerated (phi^2 <= 0)", t_new);
            phi_new[i] = std::sqrt(g11);
        }
        out.geom = Geometry::circle(std::move(phi_new));
    } else {
        const ScalarField& w = geom.w();
        ScalarField w_new(w.grid());
        int N = w.size();
        for (int i = 0; i < N; ++i) {
            w_new[i] = w[i] + dt * r.metric[i];
            if (!std::isfinite(w_new[i]))
                throw ExtinctionError("conformal exponent w blew up", t_new);
        }
        out.geom = Geometry::torus(std::move(w_new));
    }

    if (base.f) {
        ScalarField f_new(base.f->grid());
        int N = f_new.size();
        for (int i = 0; i < N; ++i) f_new[i] = (*base.f)[i] + dt * (*r.f)[i];
        out.f = std::move(f_new);
    }
    if (base.u) {
        ScalarField u_new(base.u->grid());
        int N = u_new.size();
        for (int i = 0; i < N; ++i) {
            u_new[i] = (*base.u)[i] + dt * (*r.u)[i];
            if (!(u_new[i] > 0.0))
                throw PositivityError("density lost positivity", i, t_new);
        }
        out.u = std::move(u_new);
    }
    return out;
}

CoupledState heun_step(const CoupledState& s, const FlowKind& kind, double dt) {
    Rates r0 = compute_rates(s, kind);
    CoupledState pred = apply_rates(s, r0, dt, s.t + dt);
    Rates r1 = compute_rates(pred, kind);
    // average the two stage rates
    Rates avg;
    avg.r2 = 0.5 * (r0.r2 + r1.r2);
    if (s.geom.is_grid()) avg.metric = field_binary(r0.metric, r1.metric, 0.5, 0.5);
    if (r0.f) avg.f = field_binary(*r0.f, *r1.f, 0.5, 0.5);
    if (r0.u) avg.u = field_binary(*r0.u, *r1.u, 0.5, 0.5);
    return apply_rates(s, avg, dt, s.t + dt);
}

} // namespace

double cfl_limit(const CoupledState& s, const FlowKind& kind) {
    const Geometry& geom = s.geom;
    if (!geom.is_grid()) return std::numeric_limits<double>::infinity();
    const GridSpec& g = geom.grid();
    double h2 = g.spacing(0) * g.spacing(0);
    if (g.dim == 2) h2 = std::min(h2, g.spacing(1) * g.spacing(1));

    // largest inverse-metric factor on the grid
    double inv_metric_max = 0.0;
    int N = g.node_count();
    for (int i = 0; i < N; ++i)
        inv_metric_max = std::max(inv_metric_max, geom.inv_metric(i)[0]);

    double diffusivity = 0.0;
    if (kind.type == FlowKindType::Ricci && g.dim == 2)
        diffusivity = std::max(diffusivity, inv_metric_max);
    if (s.f) diffusivity = std::max(diffusivity, inv_metric_max);
    if (s.u) {
        double umax = s.u->max();
        double coeff = s.p * (s.p == 2.0 ? umax : std::pow(umax, s.p - 1.0));
        diffusivity = std::max(diffusivity, coeff * inv_metric_max);
    }

    constexpr double c_cfl = 0.2; // explicit RK2 margin under the h^2/(4 D) bound
    double limit = diffusivity > 0.0 ? c_cfl * h2 / diffusivity
                                     : std::numeric_limits<double>::infinity();

    // reaction term S u: keep dt well inside 1/|S|
    if (s.u) {
        ScalarField S = s_trace(FlowState{s.t, s.geom, s.f}, kind);
        double smax = S.max_abs();
        if (smax > 0.0) limit = std::min(limit, 0.5 / smax);
    }
    return limit;
}

namespace {

CoupledState advance_impl(const CoupledState& s, const FlowKind& kind, double dt,
                          int& substeps, int depth) {
    if (depth > 24)
        throw ConfigError("CFL guard halved dt 24 times without reaching stability; "
                          "the state is too stiff for the explicit scheme");
    if (dt <= cfl_limit(s, kind)) {
        ++substeps;
        return heun_step(s, kind, dt);
    }
    CoupledState mid = advance_impl(s, kind, 0.5 * dt, substeps, depth + 1);
    return advance_impl(mid, kind, 0.5 * dt, substeps, depth + 1);
}

} // namespace

CoupledState advance(const CoupledState& s, const FlowKind& kind, double dt, int& substeps) {
    if (!(dt > 0.0)) throw ConfigError("step size dt must be positive");
    return advance_impl(s, kind, dt, substeps, 0);
}

} // namespace detail

FlowState flow_step(const FlowState& state, const FlowKind& kind, double dt, StepInfo* info) {
    check_kind_backend(kind, state.geom);
    check_f_presence(kind, state.f);
    detail::CoupledState s{state.t, state.geom, state.f, std::nullopt, 2.0};
    int substeps = 0;
    detail::CoupledState out = detail::advance(s, kind, dt, substeps);
    if (info) info->substeps = substeps;
    return FlowState{out.t, std::move(out.geom), std::move(out.f)};
}

ScalarField s_time_derivative(const FlowState& prev, const FlowState& next,
                              const FlowKind& kind) {
    if (prev.geom.is_grid() != next.geom.is_grid() ||
        (prev.geom.is_grid() && !(prev.geom.grid() == next.geom.grid())))
        throw ConfigError("s_time_derivative: snapshot grids do not match");
    ScalarField sp = s_trace(prev, kind);
    ScalarField sn = s_trace(next, kind);
    double span = next.t - prev.t;
    if (!(span > 0.0)) throw ConfigError("s_time_derivative: snapshots must be time-ordered");
    return field_binary(sn, sp, 1.0 / span, -1.0 / span);
}

CurvatureBounds minimal_bounds(const FlowState& state, const FlowKind& kind) {
    const Geometry& geom = state.geom;
    int n = geom.dimension();

    // eigenvalues of Ric and S relative to g reduce to conformal coefficients
    ScalarField ric_coeff = [&] {
        switch (geom.backend()) {
        case Geometry::Backend::Circle1D: return ScalarField(geom.grid(), 0.0);
        case Geometry::Backend::ConformalTorus2D: {
            ScalarField R = scalar_curvature(geom);
            for (int i = 0; i < R.size(); ++i) R[i] *= 0.5;
            return R;
        }
        default: {
            ScalarField out(GridSpec::homogeneous());
            out[0] = (geom.sphere_n() - 1) / geom.sphere_r2();
            return out;
        }
        }
    }();
    ScalarField s_coeff = s_conformal(state, kind);

    CurvatureBounds b;
    b.k1 = n >= 2 ? std::max(0.0, -ric_coeff.min() / (n - 1)) : 0.0;
    b.k2 = std::max(0.0, -s_coeff.min());
    b.k3 = std::max(0.0, s_coeff.max());
    return b;
}

} // namespace pmeflow
