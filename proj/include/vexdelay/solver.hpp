#pragma once

#include <string>
#include <vector>

#include "vexdelay/energetics.hpp"
#include "vexdelay/state.hpp"

namespace vexdelay
{

/// Samples f0(x, -rho tau) into z and pre-fills the history buffer.
///
/// Logs (via the returned string) an inconsistency between f0(., 0) and u1
/// beyond 1e-8; this is a warning, not an error.
SimState init_state(const Model& model, const GridFunction& u0, const GridFunction& u1,
                    std::string* warning = nullptr);

/// Second-order centered Laplacian; boundary rows are zero.
GridFunction laplacian(const Grid& grid, const GridFunction& u);

/// mu1 v |v|^(m - 2), node-wise.
GridFunction damping_force(const GridFunction& v, const ExponentField& m, double mu1);

/// Trapezoid in tau of mu2(tau_k) z_k |z_k|^(m - 2), z_end is nodes x n_tau.
GridFunction delay_force(const Eigen::Ref<const Matrix>& z_end, const DelayKernel& kernel,
                         const ExponentField& m);

/// u |u|^(p - 2), node-wise.
GridFunction source_force(const GridFunction& u, const ExponentField& p);

/// One kick-drift-kick step of the wave equation plus the upwind rho-transport of z.
/// Returns false if a non-finite value appeared.
bool step(SimState& state, const Model& model);

/// Velocity at time t - tau rho from the history buffer (or f0 before t = 0).
GridFunction history_oracle(const SimState& state, const Model& model, double tau, double rho);

enum class Termination { reached_end, blowup_threshold, numerical_overflow };

const char* to_string(Termination reason);

struct RunOptions
{
    double t_end = 10;
    double threshold = 1e6;
    int sample_every = 1;
    LyapunovParameters lyapunov;
};

struct Sample
{
    EnergyReport report;
    double sup_u = 0;
};

struct Trajectory
{
    std::vector<Sample> samples;
    Termination termination = Termination::reached_end;
    double end_time = 0;        // time at which stepping stopped
    LyapunovParameters lyapunov;  // the parameters actually used for L
    std::string warning;
};

Trajectory run(const Model& model, const GridFunction& u0, const GridFunction& u1,
               const RunOptions& options);

}  // namespace vexdelay
