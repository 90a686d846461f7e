#include "pmeflow/identities.hpp"

#include <cmath>

#include "pmeflow/structure.hpp"

namespace pmeflow {

namespace {

// homogeneous-aware primitives: on the sphere all spatial derivatives of a
// homogeneous field vanish and tensors live in coefficient-of-g form
VectorField grad_h(const Geometry& geom, const ScalarField& f) {
    return geom.is_grid() ? gradient(geom, f) : VectorField(GridSpec::homogeneous(), 1);
}

ScalarField lap_h(const Geometry& geom, const ScalarField& f) {
    return geom.is_grid() ? laplace_beltrami(geom, f) : ScalarField(GridSpec::homogeneous());
}

SymTensorField hess_h(const Geometry& geom, const ScalarField& f) {
    return geom.is_grid() ? hessian(geom, f)
                          : SymTensorField(GridSpec::homogeneous(), 0);
}

// covector(partials) . contravariant vector
ScalarField form_dot(const GridSpec& g, const std::array<ScalarField, 2>& form, int dim,
                     const VectorField& X) {
    ScalarField out(g);
    int N = g.node_count();
    for (int node = 0; node < N; ++node) {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += form[a][node] * X.at(a, node);
        out[node] = s;
    }
    return out;
}

// directional derivative grad f . grad v with grad v contravariant
ScalarField deriv_dot(const Geometry& geom, const ScalarField& f, const VectorField& gradv) {
    const GridSpec& g = f.grid();
    if (g.dim == 0) return ScalarField(g); // homogeneous: zero
    int dim = g.dim;
    std::array<ScalarField, 2> df;
    for (int a = 0; a < dim; ++a) df[a] = partial_derivative(f, a);
    return form_dot(g, df, dim, gradv);
}

struct Prims {
    double t = 0.0;
    const Geometry* geom = nullptr;
    ScalarField v;      // pressure
    ScalarField S;      // trace of S_ij
    ScalarField A;      // Lap v
    ScalarField q;      // |grad v|^2
    VectorField gradv;  // contravariant
};

Prims snapshot_prims(const Run& run, size_t k) {
    Prims p;
    p.t = run.snaps[k].t;
    p.geom = &run.snaps[k].geom;
    p.v = run.pressure(k);
    p.S = s_trace(run.flow_state(k), run.kind);
    p.A = lap_h(*p.geom, p.v);
    p.gradv = grad_h(*p.geom, p.v);
    p.q = p.geom->is_grid() ? vector_norm_sq(*p.geom, p.gradv)
                            : ScalarField(GridSpec::homogeneous());
    return p;
}

void require_triple(const Run& run, size_t i, const char* what) {
    if (run.size() < 3 || i == 0 || i + 1 >= run.size())
        throw ConfigError(std::string(what) + " needs an interior snapshot of a run with >= 3");
    double d0 = run.snaps[i].t - run.snaps[i - 1].t;
    double d1 = run.snaps[i + 1].t - run.snaps[i].t;
    if (std::abs(d1 - d0) > 1e-10 * std::max(d0, d1))
        throw ConfigError(std::string(what) + " needs equally spaced snapshots");
}

double grid_h(const Geometry& geom) {
    if (!geom.is_grid()) return 0.0;
    const GridSpec& g = geom.grid();
    double h = g.spacing(0);
    if (g.dim == 2) h = std::max(h, g.spacing(1));
    return h;
}

ResidualReport make_report(const std::string& name, const Run& run, size_t i,
                           const std::vector<const ScalarField*>& comps, double scale) {
    const Geometry& geom = run.snaps[i].geom;
    ResidualReport rep;
    rep.identity = name;
    rep.h = grid_h(geom);
    rep.dt = run.snaps[i].t - run.snaps[i - 1].t;
    rep.scale = scale;
    double vol = 0.0;
    {
        ScalarField ones = geom.is_grid() ? ScalarField(geom.grid(), 1.0)
                                          : ScalarField(GridSpec::homogeneous(), 1.0);
        vol = integrate(geom, ones);
    }
    double l2_acc = 0.0;
    for (const ScalarField* c : comps) {
        rep.linf = std::max(rep.linf, c->max_abs());
        ScalarField sq(c->grid());
        for (int n = 0; n < c->size(); ++n) sq[n] = (*c)[n] * (*c)[n];
        l2_acc += integrate(geom, sq);
    }
    rep.l2 = std::sqrt(l2_acc / vol);
    return rep;
}

ScalarField centered_dt(const ScalarField& prev, const ScalarField& next, double two_dt) {
    return field_binary(next, prev, 1.0 / two_dt, -1.0 / two_dt);
}

} // namespace

ScalarField op_L(const ScalarField& h_prev, const ScalarField& h_mid,
                 const ScalarField& h_next, const Geometry& geom_mid,
                 const ScalarField& v_mid, double p, double dt) {
    if (!(dt > 0.0)) throw ConfigError("op_L needs positive snapshot spacing");
    ScalarField lap = lap_h(geom_mid, h_mid);
    ScalarField out(h_mid.grid());
    int N = out.size();
    for (int i = 0; i < N; ++i)
        out[i] = (h_next[i] - h_prev[i]) / (2.0 * dt) - (p - 1.0) * v_mid[i] * lap[i];
    return out;
}

ResidualReport residual_metric_evolution(const Run& run, size_t i) {
    require_triple(run, i, "residual_metric_evolution");
    const Geometry& gm = run.snaps[i].geom;
    if (!gm.is_grid())
        throw BackendError("residual_metric_evolution needs a grid backend");
    const Geometry& gp = run.snaps[i - 1].geom;
    const Geometry& gn = run.snaps[i + 1].geom;
    double two_dt = run.snaps[i + 1].t - run.snaps[i - 1].t;

    SymTensorField S = s_tensor(run.flow_state(i), run.kind);
    int ncomp = S.ncomp();
    int N = gm.node_count();
    std::vector<ScalarField> res(static_cast<size_t>(ncomp), ScalarField(gm.grid()));
    double scale = 0.0;
    for (int node = 0; node < N; ++node) {
        auto mp = gp.metric(node);
        auto mn = gn.metric(node);
        for (int c = 0; c < ncomp; ++c) {
            double dgdt = (mn[c] - mp[c]) / two_dt;
            double rhs = -2.0 * S.at(c, node);
            res[static_cast<size_t>(c)][node] = dgdt - rhs;
            scale = std::max({scale, std::abs(dgdt), std::abs(rhs)});
        }
    }
    std::vector<const ScalarField*> ptrs;
    for (auto& r : res) ptrs.push_back(&r);
    return make_report("metric_evolution", run, i, ptrs, scale);
}

ResidualReport residual_laplacian_evolution(const Run& run, size_t i) {
    require_triple(run, i, "residual_laplacian_evolution");
    const Geometry& gm = run.snaps[i].geom;
    if (!gm.is_grid())
        throw BackendError("residual_laplacian_evolution needs a grid backend");
    Prims pm = snapshot_prims(run, i);
    Prims pp = snapshot_prims(run, i - 1);
    Prims pn = snapshot_prims(run, i + 1);
    double two_dt = pn.t - pp.t;

    ScalarField lhs = centered_dt(pp.A, pn.A, two_dt);
    ScalarField v_t = centered_dt(pp.v, pn.v, two_dt);
    ScalarField lap_vt = laplace_beltrami(gm, v_t);
    ScalarField sh = tensor_inner(gm, s_tensor(run.flow_state(i), run.kind), hessian(gm, pm.v));

    // g^{ij} d/dt Gamma^k_ij, contracted against d_k v
    ChristoffelField gam_p = christoffel(run.snaps[i - 1].geom);
    ChristoffelField gam_n = christoffel(run.snaps[i + 1].geom);
    const GridSpec& g = gm.grid();
    int dim = g.dim;
    int N = g.node_count();
    std::array<ScalarField, 2> dv;
    for (int a = 0; a < dim; ++a) dv[a] = partial_derivative(pm.v, a);

    ScalarField res(g);
    double scale = 0.0;
    for (int node = 0; node < N; ++node) {
        auto gi = gm.inv_metric(node);
        double gamma_term = 0.0;
        for (int k = 0; k < dim; ++k) {
            double tr = 0.0;
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b)
                    tr += gi[SymTensorField::sym_index(a, b)] *
                          (gam_n.at(k, a, b, node) - gam_p.at(k, a, b, node)) / two_dt;
            gamma_term += tr * dv[k][node];
        }
        double rhs = 2.0 * sh[node] + lap_vt[node] - gamma_term;
        res[node] = lhs[node] - rhs;
        scale = std::max({scale, std::abs(lhs[node]), std::abs(rhs)});
    }
    ResidualReport rep = make_report("laplacian_evolution", run, i, {&res}, scale);
    // d/dt o Lap and Lap o d/dt commute up to cancellation noise that the
    // composed stencils amplify by 1/(dt h^2); record that floor
    double inv_conf_max = 0.0;
    for (double c : gm.inv_conformal_factor()) inv_conf_max = std::max(inv_conf_max, c);
    double hmin = std::min(g.spacing(0), g.dim == 2 ? g.spacing(1) : g.spacing(0));
    rep.floor = 64.0 * 2.2e-16 * pm.v.max_abs() * inv_conf_max / (rep.dt * hmin * hmin);
    return rep;
}

ResidualReport residual_gradient_evolution(const Run& run, size_t i) {
    require_triple(run, i, "residual_gradient_evolution");
    const Geometry& gm = run.snaps[i].geom;
    if (!gm.is_grid())
        throw BackendError("residual_gradient_evolution needs a grid backend");
    Prims pm = snapshot_prims(run, i);
    Prims pp = snapshot_prims(run, i - 1);
    Prims pn = snapshot_prims(run, i + 1);
    double two_dt = pn.t - pp.t;

    ScalarField lhs = centered_dt(pp.q, pn.q, two_dt);
    ScalarField v_t = centered_dt(pp.v, pn.v, two_dt);
    ScalarField svv = tensor_contract(s_tensor(run.flow_state(i), run.kind), pm.gradv, pm.gradv);
    ScalarField cross = vector_dot(gm, gradient(gm, v_t), pm.gradv);

    ScalarField res(gm.grid());
    int N = res.size();
    double scale = 0.0;
    for (int node = 0; node < N; ++node) {
        double rhs = 2.0 * svv[node] + 2.0 * cross[node];
        res[node] = lhs[node] - rhs;
        scale = std::max({scale, std::abs(lhs[node]), std::abs(rhs)});
    }
    return make_report("gradient_evolution", run, i, {&res}, scale);
}

ResidualReport residual_connection_evolution(const Run& run, size_t i) {
    require_triple(run, i, "residual_connection_evolution");
    const Geometry& gm = run.snaps[i].geom;
    if (!gm.is_grid())
        throw BackendError("residual_connection_evolution needs a grid backend");
    double two_dt = run.snaps[i + 1].t - run.snaps[i - 1].t;
    ChristoffelField gam_p = christoffel(run.snaps[i - 1].geom);
    ChristoffelField gam_n = christoffel(run.snaps[i + 1].geom);
    VectorField gap = divergence_gap_oneform(run.flow_state(i), run.kind);

    const GridSpec& g = gm.grid();
    int dim = g.dim;
    int N = g.node_count();
    std::vector<ScalarField> res(static_cast<size_t>(dim), ScalarField(g));
    double scale = 0.0;
    for (int node = 0; node < N; ++node) {
        auto gi = gm.inv_metric(node);
        for (int k = 0; k < dim; ++k) {
            double lhs = 0.0;
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b)
                    lhs += gi[SymTensorField::sym_index(a, b)] *
                           (gam_n.at(k, a, b, node) - gam_p.at(k, a, b, node)) / two_dt;
            double rhs = 0.0;
            for (int l = 0; l < dim; ++l)
                rhs -= gi[SymTensorField::sym_index(k, l)] * gap.at(l, node);
            res[static_cast<size_t>(k)][node] = lhs - rhs;
            scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
        }
    }
    std::vector<const ScalarField*> ptrs;
    for (auto& r : res) ptrs.push_back(&r);
    return make_report("connection_evolution", run, i, ptrs, scale);
}

namespace {

// everything the L-identity right-hand sides share at the middle snapshot
struct MidTerms {
    Prims m;
    ScalarField S_t, DS, H2, SH, SVV, RVV, GS, Gq, GAPV;
    ScalarField X1, X2, X3; // grad(q/v).gradv, grad(Lap v).gradv, grad(S/v).gradv
    ScalarField q_over_v, S_over_v;
    SymTensorField s_ten;
};

MidTerms mid_terms(const Run& run, size_t i) {
    MidTerms mt;
    mt.m = snapshot_prims(run, i);
    Prims pp = snapshot_prims(run, i - 1);
    Prims pn = snapshot_prims(run, i + 1);
    double two_dt = pn.t - pp.t;
    const Geometry& geom = *mt.m.geom;
    FlowState mid = run.flow_state(i);

    mt.S_t = centered_dt(pp.S, pn.S, two_dt);
    mt.DS = lap_h(geom, mt.m.S);
    mt.s_ten = s_tensor(mid, run.kind);
    SymTensorField hess = hess_h(geom, mt.m.v);
    mt.H2 = tensor_norm_sq(geom, hess);
    mt.SH = tensor_inner(geom, mt.s_ten, hess);
    mt.SVV = tensor_contract(mt.s_ten, mt.m.gradv, mt.m.gradv);
    mt.RVV = tensor_contract(ricci(geom), mt.m.gradv, mt.m.gradv);
    mt.GS = deriv_dot(geom, mt.m.S, mt.m.gradv);
    mt.Gq = deriv_dot(geom, mt.m.q, mt.m.gradv);
    mt.q_over_v = field_quotient(mt.m.q, mt.m.v);
    mt.S_over_v = field_quotient(mt.m.S, mt.m.v);
    mt.X1 = deriv_dot(geom, mt.q_over_v, mt.m.gradv);
    mt.X2 = deriv_dot(geom, mt.m.A, mt.m.gradv);
    mt.X3 = deriv_dot(geom, mt.S_over_v, mt.m.gradv);

    VectorField gap = divergence_gap_oneform(mid, run.kind);
    const GridSpec& g = mt.m.v.grid();
    mt.GAPV = ScalarField(g);
    if (geom.is_grid()) {
        int N = g.node_count();
        for (int node = 0; node < N; ++node) {
            double s = 0.0;
            for (int a = 0; a < g.dim; ++a) s += gap.at(a, node) * mt.m.gradv.at(a, node);
            mt.GAPV[node] = s;
        }
    }
    return mt;
}

ScalarField rhs_L_lap_v(const MidTerms& t, double p) {
    ScalarField out(t.m.v.grid());
    int N = out.size();
    for (int i = 0; i < N; ++i)
        out[i] = 2.0 * p * t.X2[i] + 2.0 * t.SH[i] + (p - 1.0) * t.m.A[i] * t.m.A[i] +
                 2.0 * t.H2[i] + 2.0 * t.RVV[i] + (p - 1.0) * t.m.v[i] * t.DS[i] +
                 2.0 * (p - 1.0) * t.GS[i] + (p - 1.0) * t.m.S[i] * t.m.A[i] + t.GAPV[i];
    return out;
}

ScalarField rhs_L_grad_sq(const MidTerms& t, double p) {
    ScalarField out(t.m.v.grid());
    int N = out.size();
    for (int i = 0; i < N; ++i)
        out[i] = 2.0 * t.SVV[i] + 2.0 * (p - 1.0) * t.m.q[i] * t.m.A[i] + 2.0 * t.Gq[i] +
                 2.0 * (p - 1.0) * t.m.v[i] * t.GS[i] + 2.0 * (p - 1.0) * t.m.S[i] * t.m.q[i] -
                 2.0 * (p - 1.0) * t.m.v[i] * t.H2[i] - 2.0 * (p - 1.0) * t.m.v[i] * t.RVV[i];
    return out;
}

ScalarField rhs_L_grad_sq_over_v(const MidTerms& t, double p) {
    ScalarField out(t.m.v.grid());
    int N = out.size();
    for (int i = 0; i < N; ++i) {
        double v = t.m.v[i];
        out[i] = 2.0 * p * t.X1[i] + 2.0 * t.SVV[i] / v +
                 2.0 * (p - 1.0) * t.q_over_v[i] * t.m.A[i] +
                 t.m.q[i] * t.m.q[i] / (v * v) + 2.0 * (p - 1.0) * t.GS[i] +
                 (p - 1.0) * t.q_over_v[i] * t.m.S[i] - 2.0 * (p - 1.0) * t.H2[i] -
                 2.0 * (p - 1.0) * t.RVV[i];
    }
    return out;
}

ScalarField rhs_L_S_over_v(const MidTerms& t, double p) {
    ScalarField out(t.m.v.grid());
    int N = out.size();
    for (int i = 0; i < N; ++i) {
        double v = t.m.v[i];
        out[i] = 2.0 * p * t.X3[i] + t.m.q[i] * t.m.S[i] / (v * v) - 2.0 * t.GS[i] / v +
                 t.S_t[i] / v - (p - 1.0) * t.m.S[i] * t.m.S[i] / v - (p - 1.0) * t.DS[i];
    }
    return out;
}

// spatial form of F: (1-b)|grad v|^2/v - b(p-1)Lap v - b(p-1)S + (1-b)S/v - d/t
ScalarField f_field_spatial(const Prims& s, double p, double b, double d) {
    if (!(s.t > 0.0)) throw ConfigError("the F identity contains d/t and needs t > 0");
    ScalarField out(s.v.grid());
    int N = out.size();
    for (int i = 0; i < N; ++i)
        out[i] = (1.0 - b) * s.q[i] / s.v[i] - b * (p - 1.0) * s.A[i] -
                 b * (p - 1.0) * s.S[i] + (1.0 - b) * s.S[i] / s.v[i] - d / s.t;
    return out;
}

struct FAssembly {
    ScalarField lhs;       // L(F)
    ScalarField rhs_direct; // corrected closed form
    ScalarField rhs_routed; // through the component identities
};

FAssembly assemble_F(const Run& run, size_t i, double b, double d) {
    require_triple(run, i, "residual_F_evolution");
    double p = run.p;
    MidTerms t = mid_terms(run, i);
    Prims pp = snapshot_prims(run, i - 1);
    Prims pn = snapshot_prims(run, i + 1);
    const Geometry& geom = *t.m.geom;
    double dt = t.m.t - pp.t;

    ScalarField F_prev = f_field_spatial(pp, p, b, d);
    ScalarField F_mid = f_field_spatial(t.m, p, b, d);
    ScalarField F_next = f_field_spatial(pn, p, b, d);

    FAssembly out{op_L(F_prev, F_mid, F_next, geom, t.m.v, p, dt), {}, {}};

    // grad F . grad v from the discrete F field
    ScalarField GF = deriv_dot(geom, F_mid, t.m.gradv);

    // |Hess v + (b/2) S|^2
    SymTensorField hess = hess_h(geom, t.m.v);
    SymTensorField comp(hess.grid(), hess.dim());
    for (int c = 0; c < comp.ncomp(); ++c)
        for (int node = 0; node < comp.nodes(); ++node)
            comp.at(c, node) = hess.at(c, node) + 0.5 * b * t.s_ten.at(c, node);
    ScalarField HC2 = tensor_norm_sq(geom, comp);
    ScalarField S2 = tensor_norm_sq(geom, t.s_ten);

    double tt = t.m.t;
    // the d/t^2 term is -L(d/t); evaluate its time derivative with the same
    // centered stencil as every other one, so constant data cancels exactly
    double d_tt = d / (pp.t * pn.t);
    ScalarField direct(t.m.v.grid());
    ScalarField routed(t.m.v.grid());
    ScalarField r14 = rhs_L_lap_v(t, p);
    ScalarField r16 = rhs_L_grad_sq_over_v(t, p);
    ScalarField r17 = rhs_L_S_over_v(t, p);
    int N = direct.size();
    for (int k = 0; k < N; ++k) {
        double v = t.m.v[k], S = t.m.S[k], q = t.m.q[k], F = F_mid[k];
        double D = t.S_t[k] - t.DS[k] - 2.0 * S2[k];
        direct[k] =
            2.0 * p * GF[k] +
            ((1.0 - b) / v - (p - 1.0)) * (t.S_t[k] - 2.0 * t.GS[k] + 2.0 * t.SVV[k]) -
            2.0 * (p - 1.0) * (t.RVV[k] - t.SVV[k]) - 2.0 * (p - 1.0) * HC2[k] +
            0.5 * (b - 2.0) * (b - 2.0) * (p - 1.0) * S2[k] + (p - 1.0) * (1.0 - b) * D -
            F * F / b - ((p - 1.0) * S - (2.0 * (1.0 - b) / b) * (S / v) + 2.0 * d / (b * tt)) * F -
            ((1.0 - b) * (1.0 - b) / b) * (S * S) / (v * v) + (1.0 - b) * (q / (v * v)) * S +
            ((1.0 - b) / b) * (q * q) / (v * v) - d * d / (b * tt * tt) -
            d * (p - 1.0) * S / tt + 2.0 * ((1.0 - b) / b) * (d / tt) * (S / v) + d_tt -
            b * (p - 1.0) * t.GAPV[k];

        // the same identity re-assembled from the component identities:
        // L(F) = (1-b) L(q/v) - b(p-1) L(Lap v) - b(p-1) L(S) + (1-b) L(S/v) + d/t^2
        double LS = t.S_t[k] - (p - 1.0) * v * t.DS[k];
        routed[k] = (1.0 - b) * r16[k] - b * (p - 1.0) * r14[k] - b * (p - 1.0) * LS +
                    (1.0 - b) * r17[k] + d_tt;
    }
    out.rhs_direct = std::move(direct);
    out.rhs_routed = std::move(routed);
    return out;
}

} // namespace

std::map<std::string, ResidualReport> residual_L_identities(const Run& run, size_t i) {
    require_triple(run, i, "residual_L_identities");
    double p = run.p;
    MidTerms t = mid_terms(run, i);
    Prims pp = snapshot_prims(run, i - 1);
    Prims pn = snapshot_prims(run, i + 1);
    const Geometry& geom = *t.m.geom;
    double dt = t.m.t - pp.t;

    std::map<std::string, ResidualReport> out;
    auto add = [&](const std::string& name, const ScalarField& lhs_prev,
                   const ScalarField& lhs_mid, const ScalarField& lhs_next,
                   const ScalarField& rhs) {
        ScalarField L = op_L(lhs_prev, lhs_mid, lhs_next, geom, t.m.v, p, dt);
        ScalarField res = field_binary(L, rhs, 1.0, -1.0);
        double scale = std::max(L.max_abs(), rhs.max_abs());
        out.emplace(name, make_report(name, run, i, {&res}, scale));
    };

    add("L_lap_v", pp.A, t.m.A, pn.A, rhs_L_lap_v(t, p));
    add("L_grad_sq", pp.q, t.m.q, pn.q, rhs_L_grad_sq(t, p));
    add("L_grad_sq_over_v", field_quotient(pp.q, pp.v), t.q_over_v,
        field_quotient(pn.q, pn.v), rhs_L_grad_sq_over_v(t, p));
    add("L_S_over_v", field_quotient(pp.S, pp.v), t.S_over_v,
        field_quotient(pn.S, pn.v), rhs_L_S_over_v(t, p));
    return out;
}

ResidualReport residual_F_evolution(const Run& run, size_t i, double b, double d) {
    FAssembly fa = assemble_F(run, i, b, d);
    ScalarField res = field_binary(fa.lhs, fa.rhs_direct, 1.0, -1.0);
    double scale = std::max(fa.lhs.max_abs(), fa.rhs_direct.max_abs());
    return make_report("L_F", run, i, {&res}, scale);
}

double f_identity_route_gap(const Run& run, size_t i, double b, double d) {
    FAssembly fa = assemble_F(run, i, b, d);
    ScalarField gap = field_binary(fa.rhs_direct, fa.rhs_routed, 1.0, -1.0);
    return gap.max_abs();
}

double fit_order(const std::vector<double>& h, const std::vector<double>& res) {
    // slope of log(res) against log(1/h): positive order = decay under refinement
    size_t n = h.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        double x = std::log(h[i]);
        double y = std::log(std::max(res[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

std::vector<ConvergenceRow> convergence_study(
    const std::vector<std::map<std::string, ResidualReport>>& per_level) {
    std::vector<ConvergenceRow> rows;
    if (per_level.empty()) return rows;
    for (const auto& [name, first] : per_level.front()) {
        (void)first;
        ConvergenceRow row;
        row.identity = name;
        for (const auto& level : per_level) {
            auto it = level.find(name);
            if (it == level.end())
                throw ConfigError("convergence_study: identity '" + name +
                                  "' missing at a refinement level");
            row.h.push_back(it->second.h);
            row.dt.push_back(it->second.dt);
            row.linf.push_back(it->second.linf);
            row.l2.push_back(it->second.l2);
            row.scale.push_back(it->second.scale);
            row.floors.push_back(it->second.floor);
        }
        row.at_floor = true;
        for (size_t l = 0; l < row.linf.size(); ++l)
            if (row.linf[l] > std::max({kResidualFloor, kRelativeFloor * row.scale[l],
                                        row.floors[l]}))
                row.at_floor = false;
        for (size_t l = 1; l < row.linf.size(); ++l)
            if (row.linf[l] > row.linf[l - 1] + kResidualFloor) row.monotone = false;
        if (!row.at_floor) {
            row.order_linf = fit_order(row.h, row.linf);
            row.order_l2 = fit_order(row.h, row.l2);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace pmeflow
