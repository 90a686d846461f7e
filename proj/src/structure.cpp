#include "pmeflow/structure.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace pmeflow {

namespace {

double homog_ric_coeff(const Geometry& geom) {
    return (geom.sphere_n() - 1) / geom.sphere_r2();
}

// |X|^2 for the homogeneous convention (component 0 stores |X|)
double homog_xsq(const VectorField& X) { return X.at(0, 0) * X.at(0, 0); }

ScalarField dS_dt(const FlowState& prev, const FlowState& next, const FlowKind& kind) {
    return s_time_derivative(prev, next, kind);
}

} // namespace

ScalarField quantity_I(const FlowState& state, const FlowKind& kind, const VectorField& X) {
    const Geometry& geom = state.geom;
    if (!geom.is_grid()) {
        ScalarField out(GridSpec::homogeneous());
        double s_c = s_tensor(state, kind).at(0, 0);
        out[0] = (homog_ric_coeff(geom) - s_c) * homog_xsq(X);
        return out;
    }
    // (R^{ij} - S^{ij}) X_i X_j = (R_kl - S_kl) X^k X^l
    SymTensorField R = ricci(geom);
    SymTensorField S = s_tensor(state, kind);
    SymTensorField diff(geom.grid(), geom.grid().dim);
    int N = geom.node_count();
    for (int c = 0; c < diff.ncomp(); ++c)
        for (int node = 0; node < N; ++node)
            diff.at(c, node) = R.at(c, node) - S.at(c, node);
    return tensor_contract(diff, X, X);
}

ScalarField quantity_H(const FlowState& prev, const FlowState& mid, const FlowState& next,
                       const FlowKind& kind, const VectorField& X) {
    if (!(mid.t > 0.0))
        throw ConfigError("quantity_H contains S/t and needs t > 0");
    ScalarField St = dS_dt(prev, next, kind);
    ScalarField S = s_trace(mid, kind);
    const Geometry& geom = mid.geom;

    if (!geom.is_grid()) {
        ScalarField out(GridSpec::homogeneous());
        double s_c = s_tensor(mid, kind).at(0, 0);
        out[0] = St[0] + S[0] / mid.t + 2.0 * s_c * homog_xsq(X);
        return out;
    }

    SymTensorField Sij = s_tensor(mid, kind);
    ScalarField sxx = tensor_contract(Sij, X, X);
    int dim = geom.grid().dim;
    std::array<ScalarField, 2> dS;
    for (int a = 0; a < dim; ++a) dS[a] = partial_derivative(S, a);

    ScalarField out(geom.grid());
    int N = out.size();
    for (int i = 0; i < N; ++i) {
        double adv = 0.0;
        for (int a = 0; a < dim; ++a) adv += dS[a][i] * X.at(a, i);
        out[i] = St[i] + S[i] / mid.t - 2.0 * adv + 2.0 * sxx[i];
    }
    return out;
}

ScalarField quantity_D(const FlowState& prev, const FlowState& mid, const FlowState& next,
                       const FlowKind& kind) {
    ScalarField St = dS_dt(prev, next, kind);
    const Geometry& geom = mid.geom;
    ScalarField S2 = tensor_norm_sq(geom, s_tensor(mid, kind));

    if (!geom.is_grid()) {
        ScalarField out(GridSpec::homogeneous());
        out[0] = St[0] - 2.0 * S2[0]; // Lap S = 0 on homogeneous states
        return out;
    }
    ScalarField lapS = laplace_beltrami(geom, s_trace(mid, kind));
    ScalarField out(geom.grid());
    int N = out.size();
    for (int i = 0; i < N; ++i) out[i] = St[i] - lapS[i] - 2.0 * S2[i];
    return out;
}

VectorField divergence_gap_oneform(const FlowState& state, const FlowKind& kind) {
    const Geometry& geom = state.geom;
    if (!geom.is_grid()) return VectorField(GridSpec::homogeneous(), 1); // zero

    const GridSpec& g = geom.grid();
    int dim = g.dim;
    int N = g.node_count();
    SymTensorField S = s_tensor(state, kind);
    ScalarField trS = s_trace(state, kind);
    ChristoffelField gamma = christoffel(geom);

    // coordinate derivatives of each tensor component
    std::array<std::array<ScalarField, 3>, 2> dS;
    for (int a = 0; a < dim; ++a)
        for (int c = 0; c < S.ncomp(); ++c) {
            ScalarField comp(g);
            for (int node = 0; node < N; ++node) comp[node] = S.at(c, node);
            dS[a][c] = partial_derivative(comp, a);
        }
    std::array<ScalarField, 2> dtr;
    for (int a = 0; a < dim; ++a) dtr[a] = partial_derivative(trS, a);

    auto cov_dS = [&](int k, int i, int j, int node) {
        // grad_k S_ij = d_k S_ij - Gamma^l_ki S_lj - Gamma^l_kj S_il
        double val = dS[k][SymTensorField::sym_index(i, j)][node];
        for (int l = 0; l < dim; ++l) {
            val -= gamma.at(l, k, i, node) * S.at(SymTensorField::sym_index(l, j), node);
            val -= gamma.at(l, k, j, node) * S.at(SymTensorField::sym_index(l, i), node);
        }
        return val;
    };

    VectorField out(g, dim); // covariant components despite the container
    for (int node = 0; node < N; ++node) {
        auto gi = geom.inv_metric(node);
        for (int j = 0; j < dim; ++j) {
            double div = 0.0;
            for (int i = 0; i < dim; ++i)
                for (int k = 0; k < dim; ++k)
                    div += gi[SymTensorField::sym_index(i, k)] * cov_dS(k, i, j, node);
            out.at(j, node) = 2.0 * div - dtr[j][node];
        }
    }
    return out;
}

VectorField divergence_gap(const FlowState& state, const FlowKind& kind) {
    const Geometry& geom = state.geom;
    if (!geom.is_grid()) return VectorField(GridSpec::homogeneous(), 1);
    VectorField oneform = divergence_gap_oneform(state, kind);
    const GridSpec& g = geom.grid();
    int dim = g.dim;
    int N = g.node_count();
    VectorField out(g, dim);
    for (int node = 0; node < N; ++node) {
        auto gi = geom.inv_metric(node);
        for (int i = 0; i < dim; ++i) {
            double s = 0.0;
            for (int j = 0; j < dim; ++j)
                s += gi[SymTensorField::sym_index(i, j)] * oneform.at(j, node);
            out.at(i, node) = s;
        }
    }
    return out;
}

ScalarField quantity_Eb(const FlowState& prev, const FlowState& mid, const FlowState& next,
                        const FlowKind& kind, const VectorField& X, double b) {
    if (!(b >= 2.0))
        throw ConfigError("quantity_Eb requires b >= 2");
    ScalarField D = quantity_D(prev, mid, next, kind);
    ScalarField I = quantity_I(mid, kind, X);
    const Geometry& geom = mid.geom;

    ScalarField out(D.grid());
    int N = out.size();
    if (!geom.is_grid()) {
        out[0] = (b - 1.0) * D[0] + 2.0 * I[0]; // gap vanishes on homogeneous states
        return out;
    }
    VectorField gap = divergence_gap_oneform(mid, kind);
    int dim = geom.grid().dim;
    for (int node = 0; node < N; ++node) {
        double gx = 0.0;
        for (int j = 0; j < dim; ++j) gx += gap.at(j, node) * X.at(j, node);
        out[node] = (b - 1.0) * D[node] + 2.0 * I[node] + b * gx;
    }
    return out;
}

ScalarField quantity_E(const FlowState& prev, const FlowState& mid, const FlowState& next,
                       const FlowKind& kind, const VectorField& X) {
    return quantity_Eb(prev, mid, next, kind, X, 2.0);
}

// ----------------------------------------------------- hypothesis sampling

namespace {

std::vector<VectorField> base_samples(const Geometry& geom, const XSampleStrategy& st) {
    std::vector<VectorField> xs;
    if (!geom.is_grid()) {
        // |X| values: zero plus the magnitudes
        VectorField zero(GridSpec::homogeneous(), 1);
        xs.push_back(zero);
        for (double m : st.magnitudes) {
            VectorField x(GridSpec::homogeneous(), 1);
            x.at(0, 0) = m;
            xs.push_back(x);
        }
        return xs;
    }
    const GridSpec& g = geom.grid();
    int dim = g.dim;
    int N = g.node_count();
    xs.emplace_back(g, dim); // zero field
    for (int a = 0; a < dim; ++a)
        for (double m : st.magnitudes)
            for (double sign : {1.0, -1.0}) {
                VectorField x(g, dim);
                for (int node = 0; node < N; ++node) x.at(a, node) = sign * m;
                xs.push_back(std::move(x));
            }
    std::mt19937_64 rng(st.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int r = 0; r < st.n_random; ++r) {
        VectorField dir(g, dim);
        for (int c = 0; c < dim; ++c)
            for (int node = 0; node < N; ++node) dir.at(c, node) = unif(rng);
        for (double m : st.magnitudes) {
            VectorField x(g, dim);
            for (int c = 0; c < dim; ++c)
                for (int node = 0; node < N; ++node) x.at(c, node) = m * dir.at(c, node);
            xs.push_back(std::move(x));
        }
    }
    return xs;
}

VectorField scaled(const VectorField& X, double m) {
    VectorField out(X.grid(), X.dim());
    for (int c = 0; c < X.dim(); ++c)
        for (int node = 0; node < X.nodes(); ++node) out.at(c, node) = m * X.at(c, node);
    return out;
}

} // namespace

HypothesisReport check_hypotheses(const Run& run, double b, const XSampleStrategy& strategy) {
    if (run.size() < 3)
        throw ConfigError("check_hypotheses needs at least three snapshots");
    if (!(b >= 2.0)) throw ConfigError("check_hypotheses requires b >= 2");

    HypothesisReport rep;
    rep.b = b;
    double inf = std::numeric_limits<double>::infinity();
    rep.min_H = inf;
    rep.min_E = inf;
    rep.min_S = inf;

    const Geometry& geom0 = run.snaps[0].geom;
    std::vector<VectorField> xs = base_samples(geom0, strategy);

    for (size_t i = 0; i < run.size(); ++i) {
        FlowState st = run.flow_state(i);
        ScalarField S = s_trace(st, run.kind);
        rep.min_S = std::min(rep.min_S, S.min());
        rep.scale_S = std::max(rep.scale_S, S.max_abs());
        CurvatureBounds kb = minimal_bounds(st, run.kind);
        rep.k.k1 = std::max(rep.k.k1, kb.k1);
        rep.k.k2 = std::max(rep.k.k2, kb.k2);
        rep.k.k3 = std::max(rep.k.k3, kb.k3);
    }

    for (size_t i = 1; i + 1 < run.size(); ++i) {
        FlowState prev = run.flow_state(i - 1);
        FlowState mid = run.flow_state(i);
        FlowState next = run.flow_state(i + 1);
        if (!(mid.t > 0.0)) continue;
        ++rep.triples;

        // per-snapshot gradient samples (pressure if available, else f)
        std::vector<VectorField> local = xs;
        if (mid.geom.is_grid()) {
            const ScalarField* base = nullptr;
            ScalarField v;
            if (run.snaps[i].u) {
                v = run.pressure(i);
                base = &v;
            } else if (run.snaps[i].f) {
                base = &*run.snaps[i].f;
            }
            if (base) {
                VectorField gv = gradient(mid.geom, *base);
                for (double m : strategy.magnitudes) {
                    local.push_back(scaled(gv, m));
                    local.push_back(scaled(gv, -m));
                }
            }
        }

        for (const VectorField& X : local) {
            ScalarField H = quantity_H(prev, mid, next, run.kind, X);
            ScalarField E = quantity_Eb(prev, mid, next, run.kind, X, b);
            rep.min_H = std::min(rep.min_H, H.min());
            rep.min_E = std::min(rep.min_E, E.min());
            rep.scale_H = std::max(rep.scale_H, H.max_abs());
            rep.scale_E = std::max(rep.scale_E, E.max_abs());
        }
        rep.x_samples = static_cast<int>(local.size());
    }

    auto pass = [](double min_val, double scale) {
        return min_val >= -1e-6 * std::max(scale, 1.0);
    };
    rep.h_ok = pass(rep.min_H, rep.scale_H);
    rep.e_ok = pass(rep.min_E, rep.scale_E);
    rep.s_ok = pass(rep.min_S, rep.scale_S);
    return rep;
}

} // namespace pmeflow
