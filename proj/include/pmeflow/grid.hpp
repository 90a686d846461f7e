#pragma once

// Periodic uniform grids and the field containers used everywhere: scalars,
// contravariant vectors, covariant symmetric 2-tensors, and connection
// coefficients. Nodes are stored row-major with the x axis outermost
// (node = ix*ny + iy); spacing is length/resolution on each axis.
//
// Analytic (homogeneous) backends carry their quantities in 1-node fields on
// the dim-0 grid returned by GridSpec::homogeneous(); for those, a
// SymTensorField holds the coefficient of the metric and a VectorField holds
// the vector norm |X|.

#include <array>
#include <cstddef>
#include <vector>

#include "pmeflow/errors.hpp"

namespace pmeflow {

struct GridSpec {
    int dim = 2;                          // 1 or 2 (0 = homogeneous, internal)
    std::array<int, 2> n{1, 1};           // nodes per axis (n[1] = 1 in 1D)
    std::array<double, 2> length{1.0, 1.0};

    static GridSpec circle(int nx, double L);
    static GridSpec torus(int nx, int ny, double Lx, double Ly);
    static GridSpec homogeneous();

    int node_count() const { return n[0] * n[1]; }
    double spacing(int axis) const { return length[axis] / n[axis]; }
    double cell_volume() const;

    int index(int ix, int iy = 0) const { return ix * n[1] + iy; }
    std::array<int, 2> coords(int node) const { return {node / n[1], node % n[1]}; }

    // node shifted by `step` cells along `axis`, wrapped periodically
    int shift(int node, int axis, int step) const;

    bool operator==(const GridSpec&) const = default;
};

class ScalarField {
public:
    ScalarField() = default;
    ScalarField(GridSpec grid, double fill = 0.0)
        : grid_(grid), v_(static_cast<size_t>(grid.node_count()), fill) {}
    ScalarField(GridSpec grid, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    int size() const { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[static_cast<size_t>(i)]; }
    double& operator[](int i) { return v_[static_cast<size_t>(i)]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double max() const;
    double min() const;
    double max_abs() const;
    bool all_finite() const;

private:
    GridSpec grid_;
    std::vector<double> v_;
};

/// Contravariant components X^c, stored component-major: comp(c)[node].
class VectorField {
public:
    VectorField() = default;
    VectorField(GridSpec grid, int dim)
        : grid_(grid), dim_(dim), v_(static_cast<size_t>(dim) * grid.node_count(), 0.0) {}

    const GridSpec& grid() const { return grid_; }
    int dim() const { return dim_; }
    int nodes() const { return grid_.node_count(); }
    double at(int c, int node) const { return v_[static_cast<size_t>(c) * nodes() + node]; }
    double& at(int c, int node) { return v_[static_cast<size_t>(c) * nodes() + node]; }
    const std::vector<double>& raw() const { return v_; }

private:
    GridSpec grid_;
    int dim_ = 0;
    std::vector<double> v_;
};

/// Covariant symmetric 2-tensor, components [T00] in 1D and [T00, T01, T11]
/// in 2D, component-major. On homogeneous backends a single component holds
/// the coefficient of g.
class SymTensorField {
public:
    SymTensorField() = default;
    SymTensorField(GridSpec grid, int dim)
        : grid_(grid), dim_(dim),
          v_(static_cast<size_t>(ncomp()) * grid.node_count(), 0.0) {}

    const GridSpec& grid() const { return grid_; }
    int dim() const { return dim_; }
    int ncomp() const { return dim_ <= 1 ? 1 : 3; }
    int nodes() const { return grid_.node_count(); }
    double at(int comp, int node) const { return v_[static_cast<size_t>(comp) * nodes() + node]; }
    double& at(int comp, int node) { return v_[static_cast<size_t>(comp) * nodes() + node]; }

    // component index for (i, j), i,j in {0, 1}
    static int sym_index(int i, int j) { return i + j; }

    double max_abs() const;

private:
    GridSpec grid_;
    int dim_ = 0;
    std::vector<double> v_;
};

/// Connection coefficients Gamma^k_ij, symmetric in (i, j); layout
/// comp = k*3 + sym_index(i,j) in 2D, single component in 1D.
class ChristoffelField {
public:
    ChristoffelField() = default;
    ChristoffelField(GridSpec grid, int dim)
        : grid_(grid), dim_(dim),
          v_(static_cast<size_t>(ncomp()) * grid.node_count(), 0.0) {}

    const GridSpec& grid() const { return grid_; }
    int dim() const { return dim_; }
    int ncomp() const { return dim_ <= 1 ? 1 : 6; }
    int nodes() const { return grid_.node_count(); }
    double at(int k, int i, int j, int node) const {
        return v_[static_cast<size_t>(comp_index(k, i, j)) * nodes() + node];
    }
    double& at(int k, int i, int j, int node) {
        return v_[static_cast<size_t>(comp_index(k, i, j)) * nodes() + node];
    }

private:
    int comp_index(int k, int i, int j) const {
        return dim_ <= 1 ? 0 : k * 3 + SymTensorField::sym_index(i, j);
    }
    GridSpec grid_;
    int dim_ = 0;
    std::vector<double> v_;
};

} // namespace pmeflow
