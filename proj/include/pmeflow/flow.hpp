#pragma once

// The geometric flow d/dt g = -2 S(t) for the pluggable S choices:
//   Static          S = 0
//   Ricci           S = Ric            (torus or sphere)
//   ScaledIdentity  S = lambda(t) g    (any backend)
//   ListExtended    S = Ric - 2 df x df, df/dt = Lap f   (circle)
//   HarmonicScalar  S = Ric - alpha(t) df x df, df/dt = Lap f (circle),
//                   alpha > 0 non-increasing
//
// Metric degrees of freedom advance by explicit RK2 (Heun) with a CFL guard
// that halves dt as needed; the coupled scalar map f and (for the PME
// module) the density u advance inside the same stages.

#include <optional>

#include "pmeflow/operators.hpp"
#include "pmeflow/table.hpp"

namespace pmeflow {

enum class FlowKindType { Static, Ricci, ScaledIdentity, ListExtended, HarmonicScalar };

struct FlowKind {
    FlowKindType type = FlowKindType::Static;
    TimeTable lambda; // ScaledIdentity
    TimeTable alpha;  // HarmonicScalar; ListExtended pins alpha = 2

    static FlowKind static_();
    static FlowKind ricci();
    static FlowKind scaled_identity(TimeTable lambda);
    static FlowKind list_extended();
    static FlowKind harmonic(TimeTable alpha);

    bool needs_f() const {
        return type == FlowKindType::ListExtended || type == FlowKindType::HarmonicScalar;
    }
    /// coupling coefficient in front of df x df (0 when absent)
    double coupling(double t) const;
    const char* name() const;
};

struct FlowState {
    double t = 0.0;
    Geometry geom;
    std::optional<ScalarField> f;
};

/// Checks the kind/backend pairing; ConfigError naming both on mismatch.
void check_kind_backend(const FlowKind& kind, const Geometry& geom);

/// S_ij at the current state. On the sphere the single component is the
/// coefficient of g.
SymTensorField s_tensor(const FlowState& state, const FlowKind& kind);

/// S = g^{ij} S_ij.
ScalarField s_trace(const FlowState& state, const FlowKind& kind);

/// Conformal coefficient c with S_ij = c g_ij. Exact on 1D and for all the
/// 2D-admitted kinds; BackendError if S is not conformal on this backend.
ScalarField s_conformal(const FlowState& state, const FlowKind& kind);

struct StepInfo {
    int substeps = 1; // 2^halvings actually taken
};

FlowState flow_step(const FlowState& state, const FlowKind& kind, double dt,
                    StepInfo* info = nullptr);

/// Centered difference of s_trace between two snapshots (same grid).
ScalarField s_time_derivative(const FlowState& prev, const FlowState& next,
                              const FlowKind& kind);

struct CurvatureBounds {
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;
};

/// Smallest nonnegative (k1, k2, k3) with Ric >= -(n-1) k1 g and
/// -k2 g <= S <= k3 g pointwise at the current time.
CurvatureBounds minimal_bounds(const FlowState& state, const FlowKind& kind);

namespace detail {

/// Full explicitly-coupled state: metric DOFs + optional f + optional u.
struct CoupledState {
    double t = 0.0;
    Geometry geom;
    std::optional<ScalarField> f;
    std::optional<ScalarField> u;
    double p = 2.0; // PME exponent, used only when u is present
};

double cfl_limit(const CoupledState& s, const FlowKind& kind);

/// One guarded step of size dt (internally subdivided when the CFL bound
/// requires it); substeps reports the count taken.
CoupledState advance(const CoupledState& s, const FlowKind& kind, double dt, int& substeps);

} // namespace detail

} // namespace pmeflow
