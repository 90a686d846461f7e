#pragma once

// Test-side oracles, independent of the solver paths they check: an RK2
// linear heat stepper for the p -> 1 regression, exhaustive path
// enumeration for the lattice action, and small field builders.

#include <functional>

#include "pmeflow/harnack.hpp"
#include "pmeflow/run.hpp"

namespace pmeflow::test {

/// u_t = Lap u + S u by explicit RK2 (independent of pme_step)
ScalarField linear_heat_run(const Geometry& geom, ScalarField u0,
                            const ScalarField& S, double dt, int steps);

/// exact minimum lattice action by exhaustive enumeration (small grids only)
double brute_force_action(const std::vector<ActionSlice>& slices, int x1, int x2);

/// cost of a given node-per-slice path under the same lattice rules
double path_action(const std::vector<ActionSlice>& slices, const std::vector<int>& nodes);

ScalarField make_field(const GridSpec& g, const std::function<double(double, double)>& f);

double rel_err(double a, double b);

} // namespace pmeflow::test
