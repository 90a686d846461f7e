#pragma once

// Experiment configuration: INI-style "key = value" text with one section
// per module. Unknown sections/keys are rejected with the offending line
// number; every numeric constraint of the referenced modules is validated
// before a run starts.

#include <cstdint>

#include "pmeflow/harnack.hpp"

namespace pmeflow {

enum class RunMode { Simulate, VerifyIdentities, CheckHarnack, FlowZoo, Convergence };
const char* to_string(RunMode m);

enum class MetricPreset { Flat, Sine, Bump, Random };
enum class InitialPreset { Constant, Gaussian, RandomSmooth };

struct RunConfig {
    // [run]
    RunMode mode = RunMode::Simulate;
    std::string output = "out";
    std::uint64_t seed = 1;
    int verbosity = 1;

    // [manifold]
    std::string backend = "torus"; // torus | circle | sphere
    int resolution = 64;
    int resolution_y = 0; // 0: same as resolution
    double length = 1.0;
    double length_y = 0.0; // 0: same as length
    MetricPreset metric = MetricPreset::Flat;
    double metric_amplitude = 0.05;
    int sphere_dim = 2;
    double sphere_r2 = 1.0;

    // [flow]
    std::string kind = "static"; // static | ricci | scaled-identity | list | harmonic
    TimeTable lambda{1.0};
    TimeTable alpha{2.0};
    double f_amplitude = 0.5;
    int f_mode = 1;

    // [pme]
    bool pme_enabled = true;
    double p = 2.0;
    InitialPreset initial = InitialPreset::Gaussian;
    double amplitude = 1.0;
    double floor = 0.1;
    double constant_value = 1.0;
    double width = 0.15; // gaussian sigma as a fraction of the domain length
    int modes = 2;       // random-smooth band limit

    // [time]
    double dt = 1e-4;
    double horizon = 1.0;
    int snapshot_stride = 10;

    // [harnack]
    HarnackConfig harnack;
    int pairs = 20;

    // [identities]
    std::vector<int> ladder{32, 64, 128};
    double t_eval = 0.01;
    double cfl_safety = 0.9;

    FlowKind flow_kind() const;
    void validate() const;
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

} // namespace pmeflow
