#pragma once

#include <array>
#include <functional>

#include <Eigen/Core>

namespace vexdelay
{

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Node values of a scalar function on a Grid, node index i + nx * j.
using GridFunction = Vector;

/// Uniform tensor grid on [0, Lx] (x [0, Ly]) including boundary nodes.
///
/// Quadrature is composite trapezoid; in 2-D the weight of a node is the
/// product of the per-axis trapezoid weights.
class Grid
{
public:
    static Grid line(double length, int nodes);
    static Grid rectangle(double length_x, double length_y, int nodes_x, int nodes_y);

    int dimension() const { return dim_; }
    int nodes(int axis) const { return nodes_[axis]; }
    double extent(int axis) const { return extent_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    double min_spacing() const;
    Index size() const { return weights_.size(); }
    double measure() const;

    const Vector& weights() const { return weights_; }
    double coordinate(Index node, int axis) const;
    bool on_boundary(Index node) const { return boundary_[node] != 0; }
    const Eigen::Matrix<char, Eigen::Dynamic, 1>& boundary_mask() const { return boundary_; }

    /// Sample f(x, y) at every node (y = 0 in 1-D).
    GridFunction sample(const std::function<double(double, double)>& f) const;

    /// Zero the boundary nodes in place.
    void apply_dirichlet(GridFunction& u) const;

    double integrate(const GridFunction& f) const { return weights_.dot(f); }

    bool same_shape(const Grid& other) const;

private:
    int dim_ = 1;
    std::array<int, 2> nodes_{1, 1};
    std::array<double, 2> extent_{0.0, 0.0};
    std::array<double, 2> spacing_{0.0, 0.0};
    Vector weights_;
    Eigen::Matrix<char, Eigen::Dynamic, 1> boundary_;
};

/// Throws StructuralError unless u has one value per grid node.
void require_size(const Grid& grid, const GridFunction& u, const char* what);

}  // namespace vexdelay
