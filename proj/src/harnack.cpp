#include "pmeflow/harnack.hpp"

#include <cmath>
#include <limits>

#include "pmeflow/distance.hpp"

namespace pmeflow {

void HarnackConfig::validate() const {
    if (!(b >= 2.0)) throw ConfigError("Harnack config requires b >= 2");
    if (!(d >= b)) throw ConfigError("Harnack config requires d >= b");
    if (!(rho > 0.0)) throw ConfigError("Harnack config requires rho > 0");
    if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && c4 > 0.0))
        throw ConfigError("Harnack constants c1..c4 must be positive");
    if (!(t_start > 0.0)) throw ConfigError("Harnack window must start at t_start > 0");
}

const char* to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    default: return "not-applicable";
    }
}

ScalarField harnack_F(const PressureView& pv, const ScalarField& S, double b, double d,
                      double t) {
    if (!(t > 0.0)) throw ConfigError("harnack_F contains d/t and needs t > 0");
    ScalarField out(pv.v.grid());
    int N = out.size();
    for (int i = 0; i < N; ++i)
        out[i] = pv.grad_v_sq[i] / pv.v[i] - b * pv.v_t[i] / pv.v[i] +
                 (1.0 - b) * S[i] / pv.v[i] - d / t;
    return out;
}

double theorem1_rhs(const HarnackConfig& cfg, double p, int n, double v_max,
                    const CurvatureBounds& k) {
    cfg.validate();
    if (!(p > 1.0)) throw ConfigError("theorem1_rhs requires p > 1");
    double pref = 2.0 * n * (p - 1.0) / (1.0 + n * (p - 1.0));
    double e2 = std::sqrt(cfg.c2) * (k.k2 + k.k3) * (k.k2 + k.k3) + 1.0;
    if (!cfg.ball_mode) return pref * e2;
    double e1 = (p * p * n + 0.5 * std::sqrt(k.k1) * cfg.rho + 2.25) * cfg.c1 * (p - 1.0);
    return pref * (e1 * v_max / (cfg.rho * cfg.rho) + e2);
}

double proposition_rhs(const HarnackConfig& cfg, double p, int n, double v_max,
                       const CurvatureBounds& k) {
    cfg.validate();
    if (!(p > 1.0)) throw ConfigError("proposition_rhs requires p > 1");
    double b = cfg.b;
    double alpha = b * n * (p - 1.0) / (2.0 + b * n * (p - 1.0));
    double ksum = k.k2 + k.k3;
    double e5 = std::sqrt(cfg.c4) * ksum * ksum + (2.0 * (b - 2.0) / b) * ksum + 1.0;
    double e6 = n * ksum * (b - 2.0) * std::sqrt(b * (p - 1.0) * alpha / 2.0);
    if (!cfg.ball_mode) return b * alpha * e5 + e6;
    double e4 = (b * b * p * p * n / (4.0 * (b - 1.0)) + 0.5 * std::sqrt(k.k1) * cfg.rho + 2.25) *
                cfg.c3 * (p - 1.0);
    return b * alpha * (e4 * v_max / (cfg.rho * cfg.rho) + e5) + e6;
}

namespace {

std::vector<size_t> window_indices(const Run& run, double t_start) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < run.size(); ++i)
        if (run.snaps[i].t >= t_start - 1e-12) idx.push_back(i);
    return idx;
}

size_t nearest_snapshot(const Run& run, double t) {
    size_t best = 0;
    double err = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < run.size(); ++i) {
        double e = std::abs(run.snaps[i].t - t);
        if (e < err) {
            err = e;
            best = i;
        }
    }
    return best;
}

} // namespace

HarnackReport check_differential_harnack(const Run& run, const HarnackConfig& cfg) {
    cfg.validate();
    if (!run.snaps.front().u) throw ConfigError("differential check needs a PME run");
    HarnackReport rep;
    rep.hypotheses = check_hypotheses(run, cfg.b, cfg.sampling);

    std::vector<size_t> window = window_indices(run, cfg.t_start);
    if (window.empty()) throw ConfigError("no snapshots at or after t_start");
    const Geometry& geom0 = run.snaps[0].geom;
    int n = geom0.dimension();

    // ball masks and v_max over the included region and window
    std::vector<std::vector<char>> inside(window.size());
    double v_max = -std::numeric_limits<double>::infinity();
    for (size_t wi = 0; wi < window.size(); ++wi) {
        size_t i = window[wi];
        const Geometry& geom = run.snaps[i].geom;
        int N = geom.node_count();
        inside[wi].assign(static_cast<size_t>(N), 1);
        if (cfg.ball_mode && geom.is_grid()) {
            ScalarField dist = geodesic_distance(geom, cfg.center_node);
            for (int node = 0; node < N; ++node)
                inside[wi][static_cast<size_t>(node)] = dist[node] <= cfg.rho ? 1 : 0;
        }
        ScalarField v = run.pressure(i);
        for (int node = 0; node < N; ++node)
            if (inside[wi][static_cast<size_t>(node)]) v_max = std::max(v_max, v[node]);
    }
    rep.v_max = v_max;

    CurvatureBounds k = rep.hypotheses.k;
    rep.rhs = cfg.b == 2.0 ? theorem1_rhs(cfg, run.p, n, v_max, k)
                           : proposition_rhs(cfg, run.p, n, v_max, k);

    rep.min_margin = std::numeric_limits<double>::infinity();
    for (size_t wi = 0; wi < window.size(); ++wi) {
        size_t i = window[wi];
        PressureView pv = pressure_view(run, i);
        ScalarField S = s_trace(run.flow_state(i), run.kind);
        ScalarField F = harnack_F(pv, S, cfg.b, cfg.d, run.snaps[i].t);

        SnapshotMargin sm{run.snaps[i].t, -std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
        int N = F.size();
        for (int node = 0; node < N; ++node) {
            if (!inside[wi][static_cast<size_t>(node)]) continue;
            double margin = rep.rhs - F[node];
            sm.max_F = std::max(sm.max_F, F[node]);
            sm.min_margin = std::min(sm.min_margin, margin);
            if (margin < rep.min_margin) {
                rep.min_margin = margin;
                rep.min_margin_t = run.snaps[i].t;
                rep.min_margin_node = node;
            }
        }
        rep.series.push_back(sm);
        rep.F_fields.push_back(std::move(F));
        rep.F_times.push_back(run.snaps[i].t);
    }

    if (!rep.hypotheses.all_ok()) {
        rep.status = CheckStatus::NotApplicable;
    } else {
        double scale = std::max(std::abs(rep.rhs), 1e-300);
        rep.status = rep.min_margin >= -cfg.tolerance * scale ? CheckStatus::Pass
                                                              : CheckStatus::Fail;
    }
    return rep;
}

// ------------------------------------------------------------------ action

ActionPath action_gamma_slices(const std::vector<ActionSlice>& slices, int x1, int x2) {
    if (slices.size() < 2) throw ConfigError("action needs at least two time slices");
    const Geometry& geom0 = slices[0].geom;
    if (!geom0.is_grid()) throw BackendError("action_gamma needs a grid backend");
    const GridSpec& g = geom0.grid();
    int N = g.node_count();
    if (x1 < 0 || x1 >= N || x2 < 0 || x2 >= N)
        throw ConfigError("action endpoints out of range");

    std::vector<std::array<int, 2>> moves{{0, 0}};
    if (g.dim == 1) {
        moves.push_back({-1, 0});
        moves.push_back({+1, 0});
    } else {
        for (int a = -1; a <= 1; ++a)
            for (int c = -1; c <= 1; ++c)
                if (a != 0 || c != 0) moves.push_back({a, c});
    }

    double inf = std::numeric_limits<double>::infinity();
    std::vector<double> value(static_cast<size_t>(N), inf);
    value[static_cast<size_t>(x1)] = 0.0;
    std::vector<std::vector<int>> prev(slices.size(), std::vector<int>(static_cast<size_t>(N), -1));

    for (size_t k = 0; k + 1 < slices.size(); ++k) {
        const ActionSlice& a = slices[k];
        const ActionSlice& c = slices[k + 1];
        double dt = c.t - a.t;
        if (!(dt > 0.0)) throw ConfigError("action slices must be time-ordered");
        std::vector<double> next(static_cast<size_t>(N), inf);
        for (int y = 0; y < N; ++y) {
            double base = value[static_cast<size_t>(y)];
            if (base == inf) continue;
            for (auto mv : moves) {
                int x = g.shift(y, 0, mv[0]);
                if (g.dim == 2) x = g.shift(x, 1, mv[1]);
                double len = 0.5 * (edge_length_at(a.geom, y, mv[0], mv[1]) +
                                    edge_length_at(c.geom, x, mv[0], mv[1]));
                double s_avg = 0.5 * (a.S[y] + c.S[x]);
                double cost = base + dt * s_avg + len * len / dt;
                if (cost < next[static_cast<size_t>(x)]) {
                    next[static_cast<size_t>(x)] = cost;
                    prev[k + 1][static_cast<size_t>(x)] = y;
                }
            }
        }
        value = std::move(next);
    }

    ActionPath path;
    path.gamma = value[static_cast<size_t>(x2)];
    if (path.gamma == inf)
        throw ConfigError("action endpoints not reachable within the slice budget");
    path.nodes.assign(slices.size(), -1);
    path.times.resize(slices.size());
    int cur = x2;
    for (size_t k = slices.size(); k-- > 0;) {
        path.nodes[k] = cur;
        path.times[k] = slices[k].t;
        if (k > 0) cur = prev[k][static_cast<size_t>(cur)];
    }
    return path;
}

ActionPath action_gamma(const Run& run, int x1, double t1, int x2, double t2) {
    if (!(t1 < t2)) throw ConfigError("action_gamma requires t1 < t2");
    size_t i1 = nearest_snapshot(run, t1);
    size_t i2 = nearest_snapshot(run, t2);
    if (i1 >= i2) throw ConfigError("action_gamma: times snap to the same slice");
    std::vector<ActionSlice> slices;
    for (size_t i = i1; i <= i2; ++i)
        slices.push_back(ActionSlice{run.snaps[i].t, run.snaps[i].geom,
                                     s_trace(run.flow_state(i), run.kind)});
    return action_gamma_slices(slices, x1, x2);
}

std::vector<PairReport> check_integrated_harnack(const Run& run, const HarnackConfig& cfg,
                                                 const std::vector<PairSpec>& pairs) {
    cfg.validate();
    if (!run.snaps.front().u) throw ConfigError("integrated check needs a PME run");
    HypothesisReport hyp = check_hypotheses(run, cfg.b, cfg.sampling);
    int n = run.snaps[0].geom.dimension();
    double pref = n * (run.p - 1.0) / (1.0 + n * (run.p - 1.0));
    double e2 = std::sqrt(cfg.c2) * (hyp.k.k2 + hyp.k.k3) * (hyp.k.k2 + hyp.k.k3) + 1.0;

    double v_min = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < run.size(); ++i) v_min = std::min(v_min, run.pressure(i).min());

    std::vector<PairReport> out;
    for (const PairSpec& pr : pairs) {
        PairReport r;
        r.pair = pr;
        if (!(pr.t1 > 0.0 && pr.t1 < pr.t2))
            throw ConfigError("integrated pair needs 0 < t1 < t2");
        size_t i1 = nearest_snapshot(run, pr.t1);
        size_t i2 = nearest_snapshot(run, pr.t2);
        double t1 = run.snaps[i1].t, t2 = run.snaps[i2].t;
        r.v1 = run.pressure(i1)[pr.x1];
        r.v2 = run.pressure(i2)[pr.x2];
        ActionPath ap = action_gamma(run, pr.x1, t1, pr.x2, t2);
        r.gamma = ap.gamma;
        r.rhs = r.v2 * std::pow(t2 / t1, cfg.d / 2.0) *
                std::exp(r.gamma / (2.0 * v_min) + pref * e2 * (t2 - t1));
        r.slack = r.rhs / r.v1;
        if (!hyp.all_ok())
            r.status = CheckStatus::NotApplicable;
        else
            r.status = r.v1 <= r.rhs * (1.0 + cfg.tolerance) ? CheckStatus::Pass
                                                             : CheckStatus::Fail;
        out.push_back(std::move(r));
    }
    return out;
}

double empirical_constants(const Run& run, const HarnackConfig& cfg) {
    HarnackReport rep = check_differential_harnack(run, cfg);
    double max_F = -std::numeric_limits<double>::infinity();
    for (const auto& sm : rep.series) max_F = std::max(max_F, sm.max_F);
    if (max_F <= 0.0) return 0.0;
    int n = run.snaps[0].geom.dimension();
    return max_F / theorem1_rhs(cfg, run.p, n, rep.v_max, rep.hypotheses.k);
}

} // namespace pmeflow
