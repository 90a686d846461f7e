#pragma once

// Discrete Riemannian calculus on the grid backends: second-order centered
// periodic differences throughout. The Laplace-Beltrami operator uses the
// conservative divergence form, so its metric-weighted integral telescopes
// to zero exactly.

#include "pmeflow/geometry.hpp"

namespace pmeflow {

/// Centered periodic coordinate derivative d/dx_axis (no metric involved).
ScalarField partial_derivative(const ScalarField& f, int axis);

/// Connection coefficients from centered differences of the metric.
/// BackendError on the analytic sphere.
ChristoffelField christoffel(const Geometry& geom);

/// X^i = g^{ij} d_j f (contravariant gradient).
VectorField gradient(const Geometry& geom, const ScalarField& f);

/// Divergence-form Laplacian (1/sqrt g) d_i(sqrt g g^{ij} d_j f); on the
/// conformal torus this is exactly e^{-2w} * (flat 5-point stencil).
ScalarField laplace_beltrami(const Geometry& geom, const ScalarField& f);

/// Flat 5-point (or 3-point in 1D) Laplacian with no metric weights.
ScalarField flat_laplacian(const ScalarField& f);

/// Covariant Hessian d_i d_j f - Gamma^k_ij d_k f.
SymTensorField hessian(const Geometry& geom, const ScalarField& f);

/// Ricci tensor: zero on the circle, (R/2) g on the conformal torus with
/// R = -2 e^{-2w} Lap0 w, ((n-1)/r^2) g (coefficient form) on the sphere.
SymTensorField ricci(const Geometry& geom);
ScalarField scalar_curvature(const Geometry& geom);

/// Sum of f * sqrt(g) * cell volume (sphere: f * area).
double integrate(const Geometry& geom, const ScalarField& f);

/// |T|^2 = g^{ik} g^{jl} T_ij T_kl pointwise.
ScalarField tensor_norm_sq(const Geometry& geom, const SymTensorField& T);

/// g^{ik} g^{jl} A_ij B_kl pointwise (e.g. S^{ij} Hess_ij v).
ScalarField tensor_inner(const Geometry& geom, const SymTensorField& A,
                         const SymTensorField& B);

/// T_ij X^i Y^j pointwise (no metric needed).
ScalarField tensor_contract(const SymTensorField& T, const VectorField& X,
                            const VectorField& Y);

/// g_ij X^i Y^j pointwise.
ScalarField vector_dot(const Geometry& geom, const VectorField& X, const VectorField& Y);
ScalarField vector_norm_sq(const Geometry& geom, const VectorField& X);

/// Pointwise helpers returning new fields.
ScalarField field_binary(const ScalarField& a, const ScalarField& b, double ca, double cb);
ScalarField field_product(const ScalarField& a, const ScalarField& b);
ScalarField field_quotient(const ScalarField& a, const ScalarField& b);

/// 1/2 Lap|grad f|^2 - grad(Lap f).grad f - |Hess f|^2 - Ric(grad f, grad f);
/// vanishes in the continuum, O(h^2) discretely.
ScalarField bochner_residual(const Geometry& geom, const ScalarField& f);

} // namespace pmeflow
