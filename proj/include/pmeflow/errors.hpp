#pragma once

#include <stdexcept>
#include <string>

namespace pmeflow {

/// Invalid or inconsistent configuration (bad kind/backend pairing, bad
/// parameter ranges, malformed config text).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operation asked of a backend that cannot provide it (e.g. grid stencils
/// on the analytic sphere).
class BackendError : public std::runtime_error {
public:
    explicit BackendError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Density lost strict positivity during a PME step.
class PositivityError : public std::runtime_error {
public:
    PositivityError(const std::string& msg, int node, double time)
        : std::runtime_error(msg), node(node), time(time) {}
    int node;
    double time;
};

/// Metric became degenerate (phi^2 <= 0 or r^2 <= 0) during a flow step.
class ExtinctionError : public std::runtime_error {
public:
    ExtinctionError(const std::string& msg, double time)
        : std::runtime_error(msg), time(time) {}
    double time;
};

} // namespace pmeflow
