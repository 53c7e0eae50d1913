#include "vexdelay/solver.hpp"

#include <algorithm>
#include <cmath>

#include "vexdelay/errors.hpp"

namespace vexdelay
{

Vector Model::rho_weights() const
{
    Vector w = Vector::Constant(n_rho, rho_spacing());
    w(0) = 0.0;
    return w;
}

double Model::cfl_limit() const
{
    return 0.5 * std::min(grid.min_spacing(), kernel.tau1 * rho_spacing());
}

void HistoryBuffer::push(double t, const GridFunction& v)
{
    if (times_.size() < capacity_) {
        times_.push_back(t);
        values_.push_back(v);
        head_ = times_.size() % capacity_;
        return;
    }
    times_[head_] = t;
    values_[head_] = v;
    head_ = (head_ + 1) % capacity_;
}

std::size_t HistoryBuffer::index(std::size_t age_from_oldest) const
{
    if (times_.size() < capacity_)
        return age_from_oldest;
    return (head_ + age_from_oldest) % capacity_;
}

double HistoryBuffer::oldest_time() const { return times_[index(0)]; }

double HistoryBuffer::newest_time() const { return times_[index(times_.size() - 1)]; }

bool HistoryBuffer::interpolate(double t, GridFunction& out) const
{
    const std::size_t n = times_.size();
    if (n == 0 || t < oldest_time() || t > newest_time())
        return false;
    // Binary search over the logical (oldest-first) order.
    std::size_t lo = 0;
    std::size_t hi = n - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (times_[index(mid)] <= t)
            lo = mid;
        else
            hi = mid;
    }
    const double t0 = times_[index(lo)];
    const double t1 = times_[index(hi)];
    if (t1 == t0) {
        out = values_[index(lo)];
        return true;
    }
    const double s = (t - t0) / (t1 - t0);
    out = (1.0 - s) * values_[index(lo)] + s * values_[index(hi)];
    return true;
}

namespace
{

GridFunction sample_history(const Model& model, double s)
{
    return model.grid.sample([&](double x, double y) { return model.history(x, y, s); });
}

}  // namespace

SimState init_state(const Model& model, const GridFunction& u0, const GridFunction& u1,
                    std::string* warning)
{
    const Grid& grid = model.grid;
    require_size(grid, u0, "u0");
    require_size(grid, u1, "u1");
    if (model.n_rho < 2)
        throw ValidationError("need at least 2 rho nodes");
    if (!(model.dt > 0.0))
        throw ValidationError("time step must be positive");

    SimState s;
    s.u = u0;
    s.v = u1;
    grid.apply_dirichlet(s.u);
    grid.apply_dirichlet(s.v);

    const Index n_tau = model.kernel.size();
    s.z.resize(grid.size(), model.n_rho * n_tau);
    const double drho = model.rho_spacing();
    for (int j = 0; j < model.n_rho; ++j)
        for (Index k = 0; k < n_tau; ++k)
            s.z.col(j * n_tau + k) = sample_history(model, -(j * drho) * model.kernel.nodes(k));

    if (warning) {
        const double gap = (s.z.col(0) - s.v).cwiseAbs().maxCoeff();
        if (gap > 1e-8)
            *warning = "history f0(x, 0) differs from u1 by " + std::to_string(gap);
    }

    const auto back = std::size_t(std::ceil(model.kernel.tau2 / model.dt));
    s.history = HistoryBuffer(back + 3);
    for (std::size_t i = back + 1; i >= 1; --i) {
        const double ti = -double(i) * model.dt;
        s.history.push(ti, sample_history(model, ti));
    }
    s.history.push(0.0, s.v);
    return s;
}

GridFunction laplacian(const Grid& grid, const GridFunction& u)
{
    require_size(grid, u, "laplacian");
    GridFunction out = GridFunction::Zero(u.size());
    const int nx = grid.nodes(0);
    const double cx = 1.0 / (grid.spacing(0) * grid.spacing(0));
    if (grid.dimension() == 1) {
        for (int i = 1; i + 1 < nx; ++i)
            out(i) = cx * (u(i - 1) - 2.0 * u(i) + u(i + 1));
        return out;
    }
    const int ny = grid.nodes(1);
    const double cy = 1.0 / (grid.spacing(1) * grid.spacing(1));
    for (int j = 1; j + 1 < ny; ++j)
        for (int i = 1; i + 1 < nx; ++i) {
            const Index k = i + Index(nx) * j;
            out(k) = cx * (u(k - 1) - 2.0 * u(k) + u(k + 1)) +
                     cy * (u(k - nx) - 2.0 * u(k) + u(k + nx));
        }
    return out;
}

GridFunction damping_force(const GridFunction& v, const ExponentField& m, double mu1)
{
    GridFunction out(v.size());
    for (Index i = 0; i < v.size(); ++i)
        out(i) = mu1 * odd_pow(v(i), m(i));
    return out;
}

GridFunction delay_force(const Eigen::Ref<const Matrix>& z_end, const DelayKernel& kernel,
                         const ExponentField& m)
{
    GridFunction out = GridFunction::Zero(z_end.rows());
    for (Index k = 0; k < kernel.size(); ++k) {
        const double w = kernel.weights(k) * kernel.mu2(k);
        if (w == 0.0)
            continue;
        for (Index i = 0; i < z_end.rows(); ++i)
            out(i) += w * odd_pow(z_end(i, k), m(i));
    }
    return out;
}

GridFunction source_force(const GridFunction& u, const ExponentField& p)
{
    GridFunction out(u.size());
    for (Index i = 0; i < u.size(); ++i)
        out(i) = odd_pow(u(i), p(i));
    return out;
}

namespace
{

/// Everything in the acceleration except the instantaneous damping.
GridFunction conservative_part(const Model& model, const GridFunction& u, const Matrix& z)
{
    const Index n_tau = model.kernel.size();
    GridFunction a = laplacian(model.grid, u);
    if (model.source)
        a += source_force(u, model.p);
    if (model.kernel.mass != 0.0)
        a -= delay_force(z.rightCols(n_tau), model.kernel, model.m);
    return a;
}

void transport(Matrix& z, const Model& model)
{
    const Index n_tau = model.kernel.size();
    const Eigen::RowVectorXd courant =
        (model.dt / model.rho_spacing()) * model.kernel.nodes.cwiseInverse().transpose();
    const Eigen::RowVectorXd keep = Eigen::RowVectorXd::Ones(n_tau) - courant;
    // Descending j so each update reads the previous step's upstream values.
    for (int j = model.n_rho - 1; j >= 1; --j) {
        auto cur = z.middleCols(j * n_tau, n_tau);
        const auto up = z.middleCols((j - 1) * n_tau, n_tau);
        cur = (cur.array().rowwise() * keep.array() + up.array().rowwise() * courant.array())
                  .matrix();
    }
}

}  // namespace

bool step(SimState& state, const Model& model)
{
    const Index n_tau = model.kernel.size();
    const double half = 0.5 * model.dt;
    const double mu1 = model.kernel.mu1;

    if (model.freeze_velocity) {
        transport(state.z, model);
    } else {
        const GridFunction a0 = conservative_part(model, state.u, state.z);
        GridFunction v_pred = state.v + half * (a0 - damping_force(state.v, model.m, mu1));
        GridFunction v_half = state.v + half * (a0 - damping_force(v_pred, model.m, mu1));
        model.grid.apply_dirichlet(v_half);

        state.u += model.dt * v_half;
        model.grid.apply_dirichlet(state.u);

        transport(state.z, model);

        const GridFunction a1 = conservative_part(model, state.u, state.z);
        state.v = v_half + half * (a1 - damping_force(v_half, model.m, mu1));
        model.grid.apply_dirichlet(state.v);
    }
    for (Index k = 0; k < n_tau; ++k)
        state.z.col(k) = state.v;

    state.t = double(++state.step) * model.dt;
    state.history.push(state.t, state.v);
    return state.u.allFinite() && state.v.allFinite();
}

GridFunction history_oracle(const SimState& state, const Model& model, double tau, double rho)
{
    const double when = state.t - tau * rho;
    const double tol = 1e-12 * std::max(1.0, model.kernel.tau2);
    if (when < -model.kernel.tau2 - tol)
        throw DomainError("history requested before -tau2");
    if (when <= 0.0)
        return sample_history(model, std::max(when, -model.kernel.tau2));
    GridFunction out;
    if (!state.history.interpolate(when, out))
        throw DomainError("history buffer does not cover the requested time");
    return out;
}

const char* to_string(Termination reason)
{
    switch (reason) {
    case Termination::reached_end:
        return "reached-t_end";
    case Termination::blowup_threshold:
        return "blow-up-threshold";
    case Termination::numerical_overflow:
        return "numerical-overflow";
    }
    return "unknown";
}

Trajectory run(const Model& model, const GridFunction& u0, const GridFunction& u1,
               const RunOptions& options)
{
    if (!(options.t_end >= 0.0))
        throw ValidationError("t_end must be nonnegative");
    if (options.sample_every < 1)
        throw ValidationError("sample cadence must be at least one step");

    Trajectory traj;
    SimState state = init_state(model, u0, u1, &traj.warning);
    if (!(options.threshold > state.u.cwiseAbs().maxCoeff()))
        throw ValidationError("blow-up threshold must exceed the initial sup-norm of u");

    traj.lyapunov = options.lyapunov;
    if (std::isfinite(traj.lyapunov.alpha) && std::isnan(traj.lyapunov.epsilon)) {
        const EnergyReport first = energy_report(model, state);
        const Vector& w = model.grid.weights();
        traj.lyapunov.epsilon =
            first.H > 0.0 ? default_epsilon(first.H, w.dot(state.u.cwiseAbs2()),
                                            w.dot(state.v.cwiseAbs2()), traj.lyapunov.alpha)
                          : 0.0;
    }
    const auto record = [&] {
        Sample s;
        s.report = energy_report(model, state, traj.lyapunov);
        s.sup_u = state.u.cwiseAbs().maxCoeff();
        traj.samples.push_back(s);
    };
    record();

    const auto steps = static_cast<long>(std::llround(std::ceil(options.t_end / model.dt - 1e-9)));
    for (long n = 0; n < steps; ++n) {
        if (!step(state, model)) {
            traj.termination = Termination::numerical_overflow;
            traj.end_time = state.t;
            return traj;
        }
        if (state.u.cwiseAbs().maxCoeff() >= options.threshold) {
            traj.termination = Termination::blowup_threshold;
            traj.end_time = state.t;
            return traj;
        }
        if ((n + 1) % options.sample_every == 0 || n + 1 == steps)
            record();
    }
    traj.end_time = state.t;
    return traj;
}

}  // namespace vexdelay
