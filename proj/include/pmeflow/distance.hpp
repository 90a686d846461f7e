#pragma once

// Geodesic distance by Dijkstra on the metric-weighted lattice graph:
// 2-neighbor edges in 1D, 8-neighbor (axis + diagonal) edges in 2D. Edge
// weights average the metric length of the coordinate displacement at the
// two endpoints. Error O(h), exact on flat axis-aligned cases.

#include "pmeflow/geometry.hpp"

namespace pmeflow {

ScalarField geodesic_distance(const Geometry& geom, int source_node);

/// metric length of the displacement (dx0*h0, dx1*h1) measured at `node`
double edge_length_at(const Geometry& geom, int node, int dx0, int dx1);

} // namespace pmeflow
