#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "vexdelay/delay.hpp"
#include "vexdelay/grid.hpp"
#include "vexdelay/spaces.hpp"

namespace vexdelay
{

using Matrix = Eigen::MatrixXd;

/// History data f0(x, y, s) for s in [-tau2, 0].
using HistoryFunction = std::function<double(double x, double y, double s)>;

/// Everything about a run that does not change while stepping.
struct Model
{
    Grid grid;
    ExponentField m;
    ExponentField p;
    DelayKernel kernel;
    Vector xi;  // weight on the delay energy; zero only in the conservative test mode
    HistoryFunction history;
    int n_rho = 32;
    double dt = 0;

    // Test switches.
    bool source = true;
    bool freeze_velocity = false;

    double rho_spacing() const { return 1.0 / (n_rho - 1); }
    /// Cell weights on the rho nodes of [0, 1]: drho at every node but the inflow one.
    /// The upwind transport is exactly dissipative for this sum.
    Vector rho_weights() const;
    /// 0.5 min(h, tau1 drho): the step contract, and the automatic dt.
    double cfl_limit() const;
};

/// Ring buffer of past velocity snapshots, oldest first when iterated.
class HistoryBuffer
{
public:
    HistoryBuffer() = default;
    explicit HistoryBuffer(std::size_t capacity) : capacity_(capacity) {}

    void push(double t, const GridFunction& v);
    std::size_t size() const { return times_.size(); }
    std::size_t capacity() const { return capacity_; }
    double oldest_time() const;
    double newest_time() const;

    /// Linear interpolation in time; returns false if t is outside the stored span.
    bool interpolate(double t, GridFunction& out) const;

private:
    std::size_t index(std::size_t age_from_oldest) const;

    std::size_t capacity_ = 0;
    std::size_t head_ = 0;  // slot of the next write
    std::vector<double> times_;
    std::vector<GridFunction> values_;
};

/// Solver state. z(x, rho_j, tau_k) is stored in column j * n_tau + k, so the
/// rho = 1 slice is the last n_tau columns and the inflow slice the first n_tau.
struct SimState
{
    double t = 0;
    long step = 0;
    GridFunction u;
    GridFunction v;
    Matrix z;
    HistoryBuffer history;

    auto z_slice(int rho_node, Index n_tau) const { return z.middleCols(rho_node * n_tau, n_tau); }
    auto z_end(Index n_tau) const { return z.rightCols(n_tau); }
};

}  // namespace vexdelay
