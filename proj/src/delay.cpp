#include "vexdelay/delay.hpp"

#include <algorithm>
#include <cmath>

#include "vexdelay/errors.hpp"

namespace vexdelay
{

namespace
{

DelayKernel trapezoid_layout(double tau1, double tau2, int n_tau, double mu1)
{
    if (!(tau1 > 0.0) || !(tau1 < tau2) || !std::isfinite(tau2))
        throw ValidationError("delay window must satisfy 0 < tau1 < tau2");
    if (n_tau < 2)
        throw ValidationError("delay quadrature needs at least 2 nodes");
    if (!(mu1 >= 0.0) || !std::isfinite(mu1))
        throw ValidationError("mu1 must be finite and nonnegative");
    DelayKernel k;
    k.tau1 = tau1;
    k.tau2 = tau2;
    k.mu1 = mu1;
    const double h = (tau2 - tau1) / (n_tau - 1);
    k.nodes = Vector::LinSpaced(n_tau, tau1, tau2);
    k.weights = Vector::Constant(n_tau, h);
    k.weights(0) *= 0.5;
    k.weights(n_tau - 1) *= 0.5;
    return k;
}

void finish(DelayKernel& k)
{
    for (Index i = 0; i < k.mu2.size(); ++i)
        if (!std::isfinite(k.mu2(i)) || k.mu2(i) < 0.0)
            throw ValidationError("delay density mu2 must be nonnegative at every node");
    k.mass = k.weights.dot(k.mu2);
}

}  // namespace

DelayKernel build_kernel(const std::function<double(double)>& mu2, double tau1, double tau2,
                         int n_tau, double mu1)
{
    DelayKernel k = trapezoid_layout(tau1, tau2, n_tau, mu1);
    k.mu2.resize(n_tau);
    for (int i = 0; i < n_tau; ++i)
        k.mu2(i) = mu2(k.nodes(i));
    finish(k);
    return k;
}

DelayKernel build_kernel(const TauTable& table, double tau1, double tau2, int n_tau, double mu1)
{
    DelayKernel k = trapezoid_layout(tau1, tau2, n_tau, mu1);
    if (table.size() < 2)
        throw ValidationError("delay table needs at least two rows");
    for (std::size_t i = 1; i < table.size(); ++i)
        if (!(table[i].first > table[i - 1].first))
            throw ValidationError("delay table must be strictly increasing in tau");
    if (table.front().first > tau1 || table.back().first < tau2)
        throw ValidationError("delay table does not cover [tau1, tau2]");
    k.mu2.resize(n_tau);
    for (int i = 0; i < n_tau; ++i) {
        const double t = k.nodes(i);
        auto hi = std::lower_bound(table.begin(), table.end(), t,
                                   [](const auto& row, double v) { return row.first < v; });
        if (hi == table.begin()) {
            k.mu2(i) = hi->second;
            continue;
        }
        auto lo = hi - 1;
        if (hi == table.end()) {
            k.mu2(i) = lo->second;
            continue;
        }
        const double s = (t - lo->first) / (hi->first - lo->first);
        k.mu2(i) = (1.0 - s) * lo->second + s * hi->second;
    }
    finish(k);
    return k;
}

bool check_mass_condition(const DelayKernel& kernel) { return kernel.mass < kernel.mu1; }

XiField::XiField(Vector v) : values(std::move(v))
{
    for (Index i = 0; i < values.size(); ++i)
        if (!std::isfinite(values(i)) || !(values(i) > 0.0))
            throw ValidationError("xi must be positive at every node");
}

XiField xi_default(const DelayKernel& kernel, const ExponentField& m)
{
    if (!check_mass_condition(kernel))
        throw DomainError("delay mass condition fails; default xi would not be positive");
    const double scale = (kernel.mu1 - kernel.mass) / (2.0 * kernel.width());
    return XiField(m.values() * scale);
}

bool check_xi_condition(const DelayKernel& kernel, const XiField& xi, const ExponentField& m)
{
    if (xi.values.size() != m.size())
        throw StructuralError("xi and m live on different grids");
    for (Index i = 0; i < m.size(); ++i)
        if (!(kernel.mass + kernel.width() * xi.values(i) / m(i) < kernel.mu1))
            return false;
    return true;
}

DissipationConstant dissipation_constant(const DelayKernel& kernel, const XiField& xi,
                                         const ExponentField& m)
{
    if (!check_xi_condition(kernel, xi, m))
        throw DomainError("xi condition fails; no positive dissipation constant");
    const Vector ratio = xi.values.cwiseQuotient(m.values());
    DissipationConstant c;
    c.inf_xi_over_m = ratio.minCoeff();
    c.inf_f = kernel.mu1 - kernel.mass - kernel.width() * ratio.maxCoeff();
    c.value = std::min(c.inf_f, c.inf_xi_over_m);
    c.literal_max = std::max(c.inf_f, c.inf_xi_over_m);
    return c;
}

}  // namespace vexdelay
