#include "vexdelay/energetics.hpp"

#include <algorithm>
#include <cmath>

#include "vexdelay/errors.hpp"

namespace vexdelay
{

namespace
{

struct DelaySums
{
    double energy = 0;
    double weighted = 0;  // F
    double bulk = 0;
    double end_modular = 0;
};

DelaySums delay_sums(const Model& model, const SimState& state)
{
    DelaySums out;
    const DelayKernel& kernel = model.kernel;
    const Index n_tau = kernel.size();
    const Index n = model.grid.size();
    const Vector& w = model.grid.weights();
    const Vector w_over_m = w.cwiseQuotient(model.m.values());
    const Vector xi_w_over_m = model.xi.cwiseProduct(w_over_m);
    const Vector xi_w = model.xi.cwiseProduct(w);
    const Vector rho_w = model.rho_weights();
    const bool weighted_energy = kernel.mass != 0.0 || model.xi.any();
    const double drho = model.rho_spacing();

    for (int j = 0; j < model.n_rho; ++j) {
        const double rho = j * drho;
        const bool at_end = j == model.n_rho - 1;
        if (!weighted_energy && !at_end)
            continue;
        for (Index k = 0; k < n_tau; ++k) {
            const auto col = state.z.col(j * n_tau + k);
            double s_m = 0, s_xi_m = 0, s = 0, s_xi = 0;
            for (Index i = 0; i < n; ++i) {
                const double a = abs_pow(col(i), model.m(i));
                s_m += w_over_m(i) * a;
                s_xi_m += xi_w_over_m(i) * a;
                s += w(i) * a;
                s_xi += xi_w(i) * a;
            }
            const double tau = kernel.nodes(k);
            const double mu2 = kernel.mu2(k);
            const double cell = kernel.weights(k) * rho_w(j);
            const double energy = cell * tau * (mu2 * s_m + s_xi_m);
            out.energy += energy;
            out.weighted += std::exp(-rho * tau) * energy;
            out.bulk += cell * (mu2 * s + s_xi);
            if (at_end)
                out.end_modular += kernel.weights(k) * s;
        }
    }
    return out;
}

}  // namespace

EnergyReport energy_report(const Model& model, const SimState& state,
                           const LyapunovParameters& lyapunov)
{
    const Grid& grid = model.grid;
    require_size(grid, state.u, "state u");
    require_size(grid, state.v, "state v");
    if (state.z.rows() != grid.size() || state.z.cols() != model.n_rho * model.kernel.size())
        throw StructuralError("delay field has the wrong shape");
    if (model.xi.size() != grid.size())
        throw StructuralError("xi has the wrong size");

    const Vector& w = grid.weights();
    EnergyReport r;
    r.t = state.t;
    r.kinetic = 0.5 * w.dot(state.v.cwiseAbs2());
    r.elastic = 0.5 * gradient_norm_squared(grid, state.u);

    double potential = 0;
    double src = 0;
    double damp = 0;
    for (Index i = 0; i < grid.size(); ++i) {
        const double up = abs_pow(state.u(i), model.p(i));
        src += w(i) * up;
        potential += w(i) * up / model.p(i);
        damp += w(i) * abs_pow(state.v(i), model.m(i));
    }
    r.source_modular = src;
    r.source_potential = potential;
    r.phi = potential;
    r.damping_modular = damp;
    r.cross = w.dot(state.u.cwiseProduct(state.v));

    const DelaySums d = delay_sums(model, state);
    r.delay_energy = d.energy;
    r.F = d.weighted;
    r.delay_bulk = d.bulk;
    r.delay_modular = d.end_modular;

    r.J = r.elastic + r.delay_energy - r.source_potential;
    r.E = r.kinetic + r.J;
    r.H = -r.E;
    r.I = 2.0 * r.elastic - r.source_modular;
    if (std::isfinite(lyapunov.alpha) && std::isfinite(lyapunov.epsilon))
        r.L = blowup_functional(r.H, r.cross, lyapunov.alpha, lyapunov.epsilon);
    return r;
}

double weighted_delay_functional(const Model& model, const SimState& state)
{
    return delay_sums(model, state).weighted;
}

DissipationVerdict dissipation_check(const EnergyReport& before, const EnergyReport& after,
                                     double dissipation_rate_constant, double tolerance)
{
    DissipationVerdict v;
    v.tolerance = tolerance;
    const double dt = after.t - before.t;
    v.rate = dt > 0.0 ? (after.E - before.E) / dt : 0.0;
    if (!(dissipation_rate_constant > 0.0)) {
        v.applicable = false;
        v.bound = 0.0;
        v.holds = true;
        return v;
    }
    const double mid = 0.5 * (before.damping_modular + before.delay_modular +
                              after.damping_modular + after.delay_modular);
    v.bound = -dissipation_rate_constant * mid;
    v.holds = v.rate <= v.bound + tolerance;
    return v;
}

double alpha_window(const ExponentField& m, const ExponentField& p)
{
    const double p1 = p.lower();
    const double m2 = m.upper();
    const double w = std::min((p1 - 2.0) / (2.0 * p1), (p1 - m2) / (p1 * (m2 - 1.0)));
    if (!(w > 0.0))
        throw DomainError("alpha window is empty: the exponents violate m2 < p1 or p1 > 2");
    return w;
}

double blowup_functional(double H, double cross, double alpha, double epsilon)
{
    if (!(H > 0.0))
        return undefined;
    return std::pow(H, 1.0 - alpha) + epsilon * cross;
}

double default_epsilon(double H0, double u_norm_sq, double v_norm_sq, double alpha)
{
    if (!(H0 > 0.0))
        throw DomainError("epsilon is only defined for H(0) > 0");
    const double scale = u_norm_sq + v_norm_sq;
    if (scale == 0.0)
        return 0.0;
    return std::pow(H0, 1.0 - alpha) / scale;
}

WeightedDelayConstants weighted_delay_constants(const DelayKernel& kernel, const Vector& xi,
                                                const ExponentField& m)
{
    WeightedDelayConstants c;
    c.alpha1 = (kernel.mass + kernel.width() * xi.maxCoeff()) / m.lower();
    // tau exp(-rho tau) >= min(1, tau1) exp(-tau2) on the whole (rho, tau) box.
    c.alpha2 = std::min(1.0, kernel.tau1) * std::exp(-kernel.tau2) / m.upper();
    return c;
}

}  // namespace vexdelay
