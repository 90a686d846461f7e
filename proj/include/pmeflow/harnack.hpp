#pragma once

// The Harnack side: the pointwise quantity
//   F = |grad v|^2/v - b v_t/v + (1-b) S/v - d/t,
// the explicit right-hand sides with constants E1..E6, the space-time
// action Gamma minimized over the lattice, and the differential and
// integrated inequality checks. c1..c4 stand in for the unspecified
// absolute constants (default 1); empirical_constants reports how much of
// the default bound a run actually uses.

#include "pmeflow/structure.hpp"

namespace pmeflow {

struct HarnackConfig {
    double b = 2.0;
    double d = 2.0;
    double rho = 0.25;
    double c1 = 1.0, c2 = 1.0, c3 = 1.0, c4 = 1.0;
    double t_start = 0.1;
    double tolerance = 1e-3;
    bool ball_mode = false;  // false: Corollary (rho -> infinity, E2 only)
    int center_node = 0;     // ball center
    XSampleStrategy sampling;

    void validate() const;
};

/// F at one snapshot; t must be positive.
ScalarField harnack_F(const PressureView& pv, const ScalarField& S, double b, double d,
                      double t);

/// (2n(p-1)/(1+n(p-1))) (E1 v_max / rho^2 + E2); Corollary mode drops the
/// E1 term. E1 = (p^2 n + sqrt(k1) rho / 2 + 9/4) c1 (p-1),
/// E2 = sqrt(c2) (k2+k3)^2 + 1.
double theorem1_rhs(const HarnackConfig& cfg, double p, int n, double v_max,
                    const CurvatureBounds& k);

/// b alpha (E4 v_max / rho^2 + E5) + E6 with alpha = b n(p-1)/(2 + b n(p-1));
/// coincides with theorem1_rhs at b = 2 (c3 = c1, c4 = c2).
double proposition_rhs(const HarnackConfig& cfg, double p, int n, double v_max,
                       const CurvatureBounds& k);

enum class CheckStatus { Pass, Fail, NotApplicable };
const char* to_string(CheckStatus s);

struct SnapshotMargin {
    double t;
    double max_F;
    double min_margin;
};

struct HarnackReport {
    CheckStatus status = CheckStatus::NotApplicable;
    double rhs = 0.0;
    double v_max = 0.0;
    double min_margin = 0.0;
    double min_margin_t = 0.0;
    int min_margin_node = -1;
    std::vector<SnapshotMargin> series;
    std::vector<ScalarField> F_fields; // per window snapshot
    std::vector<double> F_times;
    HypothesisReport hypotheses;
};

HarnackReport check_differential_harnack(const Run& run, const HarnackConfig& cfg);

struct ActionSlice {
    double t;
    Geometry geom;
    ScalarField S;
};

struct ActionPath {
    std::vector<int> nodes;    // one per slice, x1 first
    std::vector<double> times;
    double gamma = 0.0;
};

/// Dynamic programming over the space-time lattice: per time slice a path
/// may stay or move to a stencil neighbor; cost dt * S_avg + len^2 / dt.
ActionPath action_gamma_slices(const std::vector<ActionSlice>& slices, int x1, int x2);

/// Slices come from the run's snapshots; t1/t2 snap to the nearest ones.
ActionPath action_gamma(const Run& run, int x1, double t1, int x2, double t2);

struct PairSpec {
    int x1;
    double t1;
    int x2;
    double t2;
};

struct PairReport {
    PairSpec pair;
    double v1 = 0.0, v2 = 0.0;
    double gamma = 0.0;
    double rhs = 0.0;
    double slack = 0.0; // rhs / v1, >= 1 when the inequality holds
    CheckStatus status = CheckStatus::NotApplicable;
};

std::vector<PairReport> check_integrated_harnack(const Run& run, const HarnackConfig& cfg,
                                                 const std::vector<PairSpec>& pairs);

/// Smallest multiple of the default bracket (E1 v_max/rho^2 + E2) that still
/// dominates F over the run window; 0 when F never goes positive.
double empirical_constants(const Run& run, const HarnackConfig& cfg);

} // namespace pmeflow
