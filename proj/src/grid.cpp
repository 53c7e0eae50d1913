#include "vexdelay/grid.hpp"

#include <cmath>
#include <string>

#include "vexdelay/errors.hpp"

namespace vexdelay
{

namespace
{

Vector trapezoid_weights(int n, double h)
{
    Vector w = Vector::Constant(n, h);
    w(0) = 0.5 * h;
    w(n - 1) = 0.5 * h;
    return w;
}

void check_axis(double length, int nodes)
{
    if (nodes < 3)
        throw ValidationError("grid needs at least 3 nodes per axis, got " + std::to_string(nodes));
    if (!(length > 0.0) || !std::isfinite(length))
        throw ValidationError("grid extent must be positive and finite");
}

}  // namespace

Grid Grid::line(double length, int nodes)
{
    check_axis(length, nodes);
    Grid g;
    g.dim_ = 1;
    g.nodes_ = {nodes, 1};
    g.extent_ = {length, 0.0};
    g.spacing_ = {length / (nodes - 1), 0.0};
    g.weights_ = trapezoid_weights(nodes, g.spacing_[0]);
    g.boundary_.setZero(nodes);
    g.boundary_(0) = 1;
    g.boundary_(nodes - 1) = 1;
    return g;
}

Grid Grid::rectangle(double length_x, double length_y, int nodes_x, int nodes_y)
{
    check_axis(length_x, nodes_x);
    check_axis(length_y, nodes_y);
    Grid g;
    g.dim_ = 2;
    g.nodes_ = {nodes_x, nodes_y};
    g.extent_ = {length_x, length_y};
    g.spacing_ = {length_x / (nodes_x - 1), length_y / (nodes_y - 1)};
    const Vector wx = trapezoid_weights(nodes_x, g.spacing_[0]);
    const Vector wy = trapezoid_weights(nodes_y, g.spacing_[1]);
    const Index n = Index(nodes_x) * nodes_y;
    g.weights_.resize(n);
    g.boundary_.setZero(n);
    for (int j = 0; j < nodes_y; ++j)
        for (int i = 0; i < nodes_x; ++i) {
            const Index k = i + Index(nodes_x) * j;
            g.weights_(k) = wx(i) * wy(j);
            g.boundary_(k) = (i == 0 || j == 0 || i == nodes_x - 1 || j == nodes_y - 1) ? 1 : 0;
        }
    return g;
}

double Grid::min_spacing() const
{
    return dim_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
}

double Grid::measure() const
{
    return dim_ == 1 ? extent_[0] : extent_[0] * extent_[1];
}

double Grid::coordinate(Index node, int axis) const
{
    if (axis == 0)
        return double(node % nodes_[0]) * spacing_[0];
    if (dim_ == 1)
        return 0.0;
    return double(node / nodes_[0]) * spacing_[1];
}

GridFunction Grid::sample(const std::function<double(double, double)>& f) const
{
    GridFunction u(size());
    for (Index k = 0; k < size(); ++k)
        u(k) = f(coordinate(k, 0), coordinate(k, 1));
    return u;
}

void Grid::apply_dirichlet(GridFunction& u) const
{
    for (Index k = 0; k < size(); ++k)
        if (boundary_(k))
            u(k) = 0.0;
}

bool Grid::same_shape(const Grid& other) const
{
    return dim_ == other.dim_ && nodes_ == other.nodes_ && extent_ == other.extent_;
}

void require_size(const Grid& grid, const GridFunction& u, const char* what)
{
    if (grid.size() == 0)
        throw StructuralError("empty grid");
    if (u.size() != grid.size())
        throw StructuralError(std::string(what) + ": expected " + std::to_string(grid.size()) +
                              " node values, got " + std::to_string(u.size()));
}

}  // namespace vexdelay
