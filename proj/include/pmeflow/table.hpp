#pragma once

// Tabulated function of time with linear interpolation, clamped outside the
// sample range. A single sample behaves as a constant.

#include <string>
#include <vector>

#include "pmeflow/errors.hpp"

namespace pmeflow {

class TimeTable {
public:
    TimeTable() : t_{0.0}, v_{0.0} {}
    explicit TimeTable(double constant) : t_{0.0}, v_{constant} {}
    TimeTable(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;

    bool positive_on_samples() const;
    bool non_increasing_on_samples() const;
    size_t samples() const { return t_.size(); }

    /// "0:2.0,1:1.5" or a bare number
    static TimeTable parse(const std::string& text);
    std::string to_string() const;

private:
    std::vector<double> t_, v_;
};

} // namespace pmeflow
