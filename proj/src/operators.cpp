#include "pmeflow/operators.hpp"

#include <cmath>

namespace pmeflow {

namespace {

void require_grid(const Geometry& geom, const char* op) {
    if (!geom.is_grid())
        throw BackendError(std::string(op) + " needs a grid backend, got " + geom.backend_name());
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* op) {
    if (!(a == b)) throw ConfigError(std::string(op) + ": field grid does not match geometry grid");
}

} // namespace

ScalarField partial_derivative(const ScalarField& f, int axis) {
    const GridSpec& g = f.grid();
    ScalarField out(g);
    if (g.dim == 0) return out; // homogeneous: zero
    double inv2h = 1.0 / (2.0 * g.spacing(axis));
    int N = g.node_count();
    for (int i = 0; i < N; ++i)
        out[i] = (f[g.shift(i, axis, +1)] - f[g.shift(i, axis, -1)]) * inv2h;
    return out;
}

ChristoffelField christoffel(const Geometry& geom) {
    require_grid(geom, "christoffel");
    const GridSpec& g = geom.grid();
    int N = g.node_count();
    int dim = g.dim;
    ChristoffelField out(g, dim);

    // metric components per node, then centered derivatives of each
    std::array<ScalarField, 3> met{ScalarField(g), ScalarField(g), ScalarField(g)};
    for (int i = 0; i < N; ++i) {
        auto m = geom.metric(i);
        met[0][i] = m[0];
        met[1][i] = m[1];
        met[2][i] = m[2];
    }
    // dmet[axis][comp]
    std::array<std::array<ScalarField, 3>, 2> dmet;
    for (int a = 0; a < dim; ++a)
        for (int c = 0; c < 3; ++c) dmet[a][c] = partial_derivative(met[c], a);

    auto met_at = [&](int c, int i, int j) { return met[SymTensorField::sym_index(i, j)][c]; };
    auto dmet_at = [&](int a, int c, int i, int j) {
        return dmet[a][SymTensorField::sym_index(i, j)][c];
    };
    (void)met_at;

    for (int node = 0; node < N; ++node) {
        auto ginv = geom.inv_metric(node);
        auto ginv_at = [&](int i, int j) { return ginv[SymTensorField::sym_index(i, j)]; };
        for (int k = 0; k < dim; ++k)
            for (int i = 0; i < dim; ++i)
                for (int j = i; j < dim; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < dim; ++l)
                        s += ginv_at(k, l) * (dmet_at(i, node, j, l) + dmet_at(j, node, i, l) -
                                              dmet_at(l, node, i, j));
                    out.at(k, i, j, node) = 0.5 * s;
                }
    }
    return out;
}

VectorField gradient(const Geometry& geom, const ScalarField& f) {
    require_grid(geom, "gradient");
    require_same_grid(f.grid(), geom.grid(), "gradient");
    const GridSpec& g = geom.grid();
    int dim = g.dim;
    VectorField out(g, dim);
    std::array<ScalarField, 2> df;
    for (int a = 0; a < dim; ++a) df[a] = partial_derivative(f, a);
    int N = g.node_count();
    for (int node = 0; node < N; ++node) {
        auto ginv = geom.inv_metric(node);
        for (int i = 0; i < dim; ++i) {
            double s = 0.0;
            for (int j = 0; j < dim; ++j)
                s += ginv[SymTensorField::sym_index(i, j)] * df[j][node];
            out.at(i, node) = s;
        }
    }
    return out;
}

ScalarField flat_laplacian(const ScalarField& f) {
    const GridSpec& g = f.grid();
    ScalarField out(g);
    if (g.dim == 0) return out;
    int N = g.node_count();
    for (int a = 0; a < g.dim; ++a) {
        double invh2 = 1.0 / (g.spacing(a) * g.spacing(a));
        for (int i = 0; i < N; ++i)
            out[i] += (f[g.shift(i, a, +1)] - 2.0 * f[i] + f[g.shift(i, a, -1)]) * invh2;
    }
    return out;
}

ScalarField laplace_beltrami(const Geometry& geom, const ScalarField& f) {
    require_grid(geom, "laplace_beltrami");
    require_same_grid(f.grid(), geom.grid(), "laplace_beltrami");
    const GridSpec& g = geom.grid();
    int N = g.node_count();

    if (geom.backend() == Geometry::Backend::ConformalTorus2D) {
        // sqrt(g) g^{ij} = delta^{ij}: exactly e^{-2w} * flat stencil
        ScalarField out = flat_laplacian(f);
        const std::vector<double>& em2w = geom.inv_conformal_factor();
        for (int i = 0; i < N; ++i) out[i] *= em2w[i];
        return out;
    }

    // Circle1D: flux form with coefficient c = sqrt(g) g^{11} = 1/phi,
    // arithmetic mean at half nodes.
    const ScalarField& phi = geom.phi();
    double invh2 = 1.0 / (g.spacing(0) * g.spacing(0));
    ScalarField out(g);
    for (int i = 0; i < N; ++i) {
        int ip = g.shift(i, 0, +1), im = g.shift(i, 0, -1);
        double cp = 0.5 * (1.0 / phi[i] + 1.0 / phi[ip]);
        double cm = 0.5 * (1.0 / phi[i] + 1.0 / phi[im]);
        out[i] = (cp * (f[ip] - f[i]) - cm * (f[i] - f[im])) * invh2 / phi[i];
    }
    return out;
}

SymTensorField hessian(const Geometry& geom, const ScalarField& f) {
    require_grid(geom, "hessian");
    require_same_grid(f.grid(), geom.grid(), "hessian");
    const GridSpec& g = geom.grid();
    int dim = g.dim;
    int N = g.node_count();
    SymTensorField out(g, dim);
    ChristoffelField gamma = christoffel(geom);

    std::array<ScalarField, 2> df;
    for (int a = 0; a < dim; ++a) df[a] = partial_derivative(f, a);

    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            int comp = SymTensorField::sym_index(i, j);
            if (i == j) {
                double invh2 = 1.0 / (g.spacing(i) * g.spacing(i));
                for (int node = 0; node < N; ++node)
                    out.at(comp, node) =
                        (f[g.shift(node, i, +1)] - 2.0 * f[node] + f[g.shift(node, i, -1)]) * invh2;
            } else {
                double inv4h = 1.0 / (4.0 * g.spacing(i) * g.spacing(j));
                for (int node = 0; node < N; ++node) {
                    int pp = g.shift(g.shift(node, i, +1), j, +1);
                    int pm = g.shift(g.shift(node, i, +1), j, -1);
                    int mp = g.shift(g.shift(node, i, -1), j, +1);
                    int mm = g.shift(g.shift(node, i, -1), j, -1);
                    out.at(comp, node) = (f[pp] - f[pm] - f[mp] + f[mm]) * inv4h;
                }
            }
            for (int node = 0; node < N; ++node) {
                double s = 0.0;
                for (int k = 0; k < dim; ++k) s += gamma.at(k, i, j, node) * df[k][node];
                out.at(comp, node) -= s;
            }
        }
    return out;
}

ScalarField scalar_curvature(const Geometry& geom) {
    switch (geom.backend()) {
    case Geometry::Backend::Circle1D:
        return ScalarField(geom.grid(), 0.0);
    case Geometry::Backend::ConformalTorus2D: {
        ScalarField R = flat_laplacian(geom.w());
        const std::vector<double>& em2w = geom.inv_conformal_factor();
        int N = geom.node_count();
        for (int i = 0; i < N; ++i) R[i] *= -2.0 * em2w[i];
        return R;
    }
    default: {
        ScalarField R(GridSpec::homogeneous());
        int n = geom.sphere_n();
        R[0] = n * (n - 1) / geom.sphere_r2();
        return R;
    }
    }
}

SymTensorField ricci(const Geometry& geom) {
    switch (geom.backend()) {
    case Geometry::Backend::Circle1D:
        return SymTensorField(geom.grid(), 1); // zero
    case Geometry::Backend::ConformalTorus2D: {
        ScalarField R = scalar_curvature(geom);
        const GridSpec& g = geom.grid();
        SymTensorField out(g, 2);
        int N = g.node_count();
        for (int node = 0; node < N; ++node) {
            auto m = geom.metric(node);
            double half_R = 0.5 * R[node];
            out.at(0, node) = half_R * m[0];
            out.at(1, node) = half_R * m[1];
            out.at(2, node) = half_R * m[2];
        }
        return out;
    }
    default: {
        SymTensorField out(GridSpec::homogeneous(), 0); // coefficient of g
        out.at(0, 0) = (geom.sphere_n() - 1) / geom.sphere_r2();
        return out;
    }
    }
}

double integrate(const Geometry& geom, const ScalarField& f) {
    if (!geom.is_grid()) return f[0] * geom.sphere_area();
    require_same_grid(f.grid(), geom.grid(), "integrate");
    const GridSpec& g = geom.grid();
    double cell = g.cell_volume();
    double s = 0.0;
    int N = g.node_count();
    for (int i = 0; i < N; ++i) s += f[i] * geom.sqrt_det(i);
    return s * cell;
}

ScalarField tensor_norm_sq(const Geometry& geom, const SymTensorField& T) {
    if (!geom.is_grid()) {
        // T = c g: |T|^2 = n c^2
        ScalarField out(GridSpec::homogeneous());
        out[0] = geom.sphere_n() * T.at(0, 0) * T.at(0, 0);
        return out;
    }
    return tensor_inner(geom, T, T);
}

ScalarField tensor_inner(const Geometry& geom, const SymTensorField& A,
                         const SymTensorField& B) {
    if (!geom.is_grid()) {
        // A = a g, B = b g: g^{ik} g^{jl} A_kl B_ij = n a b
        ScalarField out(GridSpec::homogeneous());
        out[0] = geom.sphere_n() * A.at(0, 0) * B.at(0, 0);
        return out;
    }
    const GridSpec& g = geom.grid();
    int dim = g.dim;
    int N = g.node_count();
    ScalarField out(g);
    for (int node = 0; node < N; ++node) {
        auto gi = geom.inv_metric(node);
        auto gi_at = [&](int i, int j) { return gi[SymTensorField::sym_index(i, j)]; };
        double s = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                for (int k = 0; k < dim; ++k)
                    for (int l = 0; l < dim; ++l)
                        s += gi_at(i, k) * gi_at(j, l) *
                             A.at(SymTensorField::sym_index(i, j), node) *
                             B.at(SymTensorField::sym_index(k, l), node);
        out[node] = s;
    }
    return out;
}

ScalarField tensor_contract(const SymTensorField& T, const VectorField& X,
                            const VectorField& Y) {
    const GridSpec& g = T.grid();
    int dim = T.dim();
    int N = g.node_count();
    ScalarField out(g);
    if (g.dim == 0) { // homogeneous: T = c g on unit-coefficient convention
        out[0] = T.at(0, 0) * X.at(0, 0) * Y.at(0, 0);
        return out;
    }
    for (int node = 0; node < N; ++node) {
        double s = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                s += T.at(SymTensorField::sym_index(i, j), node) * X.at(i, node) * Y.at(j, node);
        out[node] = s;
    }
    return out;
}

ScalarField vector_dot(const Geometry& geom, const VectorField& X, const VectorField& Y) {
    require_grid(geom, "vector_dot");
    const GridSpec& g = geom.grid();
    int dim = g.dim;
    int N = g.node_count();
    ScalarField out(g);
    for (int node = 0; node < N; ++node) {
        auto m = geom.metric(node);
        double s = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                s += m[SymTensorField::sym_index(i, j)] * X.at(i, node) * Y.at(j, node);
        out[node] = s;
    }
    return out;
}

ScalarField vector_norm_sq(const Geometry& geom, const VectorField& X) {
    return vector_dot(geom, X, X);
}

ScalarField field_binary(const ScalarField& a, const ScalarField& b, double ca, double cb) {
    ScalarField out(a.grid());
    int N = a.size();
    for (int i = 0; i < N; ++i) out[i] = ca * a[i] + cb * b[i];
    return out;
}

ScalarField field_product(const ScalarField& a, const ScalarField& b) {
    ScalarField out(a.grid());
    int N = a.size();
    for (int i = 0; i < N; ++i) out[i] = a[i] * b[i];
    return out;
}

ScalarField field_quotient(const ScalarField& a, const ScalarField& b) {
    ScalarField out(a.grid());
    int N = a.size();
    for (int i = 0; i < N; ++i) out[i] = a[i] / b[i];
    return out;
}

ScalarField bochner_residual(const Geometry& geom, const ScalarField& f) {
    VectorField gf = gradient(geom, f);
    ScalarField q = vector_norm_sq(geom, gf);
    ScalarField lap_q = laplace_beltrami(geom, q);
    ScalarField lap_f = laplace_beltrami(geom, f);
    VectorField glap = gradient(geom, lap_f);
    ScalarField cross = vector_dot(geom, glap, gf);
    ScalarField h2 = tensor_norm_sq(geom, hessian(geom, f));
    ScalarField ric_ff = tensor_contract(ricci(geom), gf, gf);
    ScalarField out(geom.grid());
    int N = out.size();
    for (int i = 0; i < N; ++i)
        out[i] = 0.5 * lap_q[i] - cross[i] - h2[i] - ric_ff[i];
    return out;
}

} // namespace pmeflow
