#include "pmeflow/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace pmeflow {

const char* to_string(RunMode m) {
    switch (m) {
    case RunMode::Simulate: return "simulate";
    case RunMode::VerifyIdentities: return "verify-identities";
    case RunMode::CheckHarnack: return "check-harnack";
    case RunMode::FlowZoo: return "flow-zoo";
    default: return "convergence";
    }
}

FlowKind RunConfig::flow_kind() const {
    if (kind == "static") return FlowKind::static_();
    if (kind == "ricci") return FlowKind::ricci();
    if (kind == "scaled-identity") return FlowKind::scaled_identity(lambda);
    if (kind == "list") return FlowKind::list_extended();
    if (kind == "harmonic") return FlowKind::harmonic(alpha);
    throw ConfigError("unknown flow kind: " + kind);
}

void RunConfig::validate() const {
    if (backend != "torus" && backend != "circle" && backend != "sphere")
        throw ConfigError("manifold.backend must be torus, circle or sphere");
    if (backend != "sphere") {
        if (resolution < 8) throw ConfigError("manifold.resolution must be >= 8");
        if (resolution_y != 0 && resolution_y < 8)
            throw ConfigError("manifold.resolution_y must be >= 8");
        if (length <= 0.0 || (length_y != 0.0 && length_y <= 0.0))
            throw ConfigError("manifold lengths must be positive");
    } else {
        if (sphere_dim < 2) throw ConfigError("manifold.sphere_dim must be >= 2");
        if (sphere_r2 <= 0.0) throw ConfigError("manifold.sphere_r2 must be positive");
    }
    if (backend == "circle" && metric != MetricPreset::Flat && metric_amplitude >= 1.0)
        throw ConfigError("circle metric amplitude must stay below 1 so phi > 0");

    flow_kind(); // validates kind-specific tables

    if (pme_enabled) {
        if (!(p > 1.0))
            throw ConfigError("pme.p must exceed 1 (p = 1 is the linear heat case)");
        if (!(floor > 0.0)) throw ConfigError("pme.floor must be positive");
        if (initial == InitialPreset::Constant && !(constant_value > 0.0))
            throw ConfigError("pme.constant_value must be positive");
        if (amplitude < 0.0) throw ConfigError("pme.amplitude must be nonnegative");
    }

    if (!(dt > 0.0)) throw ConfigError("time.dt must be positive");
    if (!(horizon > 0.0)) throw ConfigError("time.horizon must be positive");
    if (snapshot_stride < 1) throw ConfigError("time.snapshot_stride must be >= 1");

    harnack.validate(); // b >= 2, d >= b, rho > 0, c's > 0, t_start > 0
    if (pairs < 1) throw ConfigError("harnack.pairs must be >= 1");

    if (ladder.size() < 2) throw ConfigError("identities.resolutions needs >= 2 levels");
    for (int r : ladder)
        if (r < 8) throw ConfigError("identities.resolutions entries must be >= 8");
    if (!(t_eval > 0.0)) throw ConfigError("identities.t_eval must be positive");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
        throw ConfigError("identities.cfl_safety must lie in (0, 1]");
}

namespace {

struct Parser {
    RunConfig cfg;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("config line " + std::to_string(line_no) + ": " + msg);
    }

    double num(const std::string& v) const {
        try {
            size_t pos = 0;
            double x = std::stod(v, &pos);
            if (pos != v.size()) fail("bad number: " + v);
            return x;
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            fail("bad number: " + v);
        }
    }

    int integer(const std::string& v) const {
        double x = num(v);
        int i = static_cast<int>(x);
        if (i != x) fail("expected an integer, got " + v);
        return i;
    }

    bool boolean(const std::string& v) const {
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        fail("expected a boolean, got " + v);
    }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        auto is = [&](const char* s, const char* k) { return section == s && key == k; };

        if (is("run", "mode")) {
            if (value == "simulate") cfg.mode = RunMode::Simulate;
            else if (value == "verify-identities") cfg.mode = RunMode::VerifyIdentities;
            else if (value == "check-harnack") cfg.mode = RunMode::CheckHarnack;
            else if (value == "flow-zoo") cfg.mode = RunMode::FlowZoo;
            else if (value == "convergence") cfg.mode = RunMode::Convergence;
            else fail("unknown mode: " + value);
        } else if (is("run", "output")) cfg.output = value;
        else if (is("run", "seed")) cfg.seed = static_cast<std::uint64_t>(num(value));
        else if (is("run", "verbosity")) cfg.verbosity = integer(value);

        else if (is("manifold", "backend")) cfg.backend = value;
        else if (is("manifold", "resolution")) cfg.resolution = integer(value);
        else if (is("manifold", "resolution_y")) cfg.resolution_y = integer(value);
        else if (is("manifold", "length")) cfg.length = num(value);
        else if (is("manifold", "length_y")) cfg.length_y = num(value);
        else if (is("manifold", "metric")) {
            if (value == "flat") cfg.metric = MetricPreset::Flat;
            else if (value == "sine") cfg.metric = MetricPreset::Sine;
            else if (value == "bump") cfg.metric = MetricPreset::Bump;
            else if (value == "random") cfg.metric = MetricPreset::Random;
            else fail("unknown metric preset: " + value);
        } else if (is("manifold", "metric_amplitude")) cfg.metric_amplitude = num(value);
        else if (is("manifold", "sphere_dim")) cfg.sphere_dim = integer(value);
        else if (is("manifold", "sphere_r2")) cfg.sphere_r2 = num(value);

        else if (is("flow", "kind")) cfg.kind = value;
        else if (is("flow", "lambda")) cfg.lambda = TimeTable::parse(value);
        else if (is("flow", "alpha")) cfg.alpha = TimeTable::parse(value);
        else if (is("flow", "f_amplitude")) cfg.f_amplitude = num(value);
        else if (is("flow", "f_mode")) cfg.f_mode = integer(value);

        else if (is("pme", "enabled")) cfg.pme_enabled = boolean(value);
        else if (is("pme", "p")) {
            cfg.p = num(value);
            if (!(cfg.p > 1.0)) fail("pme.p must exceed 1, got " + value);
        } else if (is("pme", "initial")) {
            if (value == "constant") cfg.initial = InitialPreset::Constant;
            else if (value == "gaussian") cfg.initial = InitialPreset::Gaussian;
            else if (value == "random-smooth") cfg.initial = InitialPreset::RandomSmooth;
            else fail("unknown initial preset: " + value);
        } else if (is("pme", "amplitude")) cfg.amplitude = num(value);
        else if (is("pme", "floor")) cfg.floor = num(value);
        else if (is("pme", "constant_value")) cfg.constant_value = num(value);
        else if (is("pme", "width")) cfg.width = num(value);
        else if (is("pme", "modes")) cfg.modes = integer(value);

        else if (is("time", "dt")) cfg.dt = num(value);
        else if (is("time", "horizon")) cfg.horizon = num(value);
        else if (is("time", "snapshot_stride")) cfg.snapshot_stride = integer(value);

        else if (is("harnack", "b")) {
            cfg.harnack.b = num(value);
            if (!(cfg.harnack.b >= 2.0)) fail("harnack.b must be >= 2, got " + value);
        } else if (is("harnack", "d")) cfg.harnack.d = num(value);
        else if (is("harnack", "rho")) cfg.harnack.rho = num(value);
        else if (is("harnack", "c1")) cfg.harnack.c1 = num(value);
        else if (is("harnack", "c2")) cfg.harnack.c2 = num(value);
        else if (is("harnack", "c3")) cfg.harnack.c3 = num(value);
        else if (is("harnack", "c4")) cfg.harnack.c4 = num(value);
        else if (is("harnack", "t_start")) cfg.harnack.t_start = num(value);
        else if (is("harnack", "tolerance")) cfg.harnack.tolerance = num(value);
        else if (is("harnack", "mode")) {
            if (value == "ball") cfg.harnack.ball_mode = true;
            else if (value == "corollary") cfg.harnack.ball_mode = false;
            else fail("harnack.mode must be ball or corollary");
        } else if (is("harnack", "center")) cfg.harnack.center_node = integer(value);
        else if (is("harnack", "pairs")) cfg.pairs = integer(value);
        else if (is("harnack", "x_random")) cfg.harnack.sampling.n_random = integer(value);

        else if (is("identities", "resolutions")) {
            cfg.ladder.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ','))
                cfg.ladder.push_back(integer(item));
        } else if (is("identities", "t_eval")) cfg.t_eval = num(value);
        else if (is("identities", "cfl_safety")) cfg.cfl_safety = num(value);

        else fail("unknown key '" + key + "' in section [" + section + "]");
    }
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

RunConfig parse_config(const std::string& text) {
    Parser p;
    std::istringstream is(text);
    std::string line, section;
    static const std::vector<std::string> known_sections{
        "run", "manifold", "flow", "pme", "time", "harnack", "identities"};
    while (std::getline(is, line)) {
        ++p.line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') p.fail("malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const auto& s : known_sections) known = known || s == section;
            if (!known) p.fail("unknown section [" + section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) p.fail("empty key or value");
        if (section.empty()) p.fail("key before any [section]");
        try {
            p.set(section, key, value);
        } catch (const ConfigError& e) {
            std::string what = e.what();
            if (what.rfind("config line", 0) == 0) throw;
            p.fail(what);
        }
    }
    // cross-field constraints that need the full text parsed
    if (!(p.cfg.harnack.d >= p.cfg.harnack.b))
        throw ConfigError("harnack requires d >= b (got d = " +
                          std::to_string(p.cfg.harnack.d) +
                          ", b = " + std::to_string(p.cfg.harnack.b) + ")");
    p.cfg.validate();
    return p.cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

} // namespace pmeflow
