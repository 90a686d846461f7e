#pragma once

// The evolving-tensor quantities attached to S:
//   I(S,X) = (R^{ij} - S^{ij}) X_i X_j
//   H(S,X) = dS/dt + S/t - 2 grad_i S X^i + 2 S^{ij} X_i X_j
//   D(S)   = dS/dt - Lap S - 2 |S_ij|^2
//   E(S,X) = D + 2 I + 2 (2 div S - dS)_j X^j,   E_b generalizes the weights
// dS/dt is a centered difference of consecutive snapshots; everything else
// is evaluated at the middle state. The "for all X" hypotheses are sampled
// over a fixed seeded family, never certified.

#include <cstdint>

#include "pmeflow/run.hpp"

namespace pmeflow {

ScalarField quantity_I(const FlowState& state, const FlowKind& kind, const VectorField& X);

/// t is taken from the middle state and must be positive.
ScalarField quantity_H(const FlowState& prev, const FlowState& mid, const FlowState& next,
                       const FlowKind& kind, const VectorField& X);

ScalarField quantity_D(const FlowState& prev, const FlowState& mid, const FlowState& next,
                       const FlowKind& kind);

/// The 1-form 2 grad^i S_ij - grad_j S raised to a vector.
VectorField divergence_gap(const FlowState& state, const FlowKind& kind);

/// Same object kept covariant (used inside E and the connection identity).
VectorField divergence_gap_oneform(const FlowState& state, const FlowKind& kind);

ScalarField quantity_E(const FlowState& prev, const FlowState& mid, const FlowState& next,
                       const FlowKind& kind, const VectorField& X);

/// (b-1) D + 2 I + b (2 div S - dS)_j X^j; requires b >= 2.
ScalarField quantity_Eb(const FlowState& prev, const FlowState& mid, const FlowState& next,
                        const FlowKind& kind, const VectorField& X, double b);

struct XSampleStrategy {
    std::uint64_t seed = 1;
    int n_random = 4;
    std::vector<double> magnitudes{0.25, 1.0, 4.0};
};

struct HypothesisReport {
    double min_H = 0.0, min_E = 0.0, min_S = 0.0;
    double scale_H = 0.0, scale_E = 0.0, scale_S = 0.0;
    CurvatureBounds k;
    bool h_ok = false, e_ok = false, s_ok = false;
    int x_samples = 0;
    int triples = 0;
    double b = 2.0;
    // the X family is sampled, not exhaustive; reports must say so
    static constexpr const char* sampling_note =
        "sampled X family: zero, +-coordinate, +-grad v, seeded random";

    bool all_ok() const { return h_ok && e_ok && s_ok; }
};

HypothesisReport check_hypotheses(const Run& run, double b, const XSampleStrategy& strategy);

} // namespace pmeflow
