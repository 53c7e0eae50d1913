#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "vexdelay/grid.hpp"
#include "vexdelay/spaces.hpp"

namespace vexdelay
{

/// Distributed delay density mu2 on [tau1, tau2], discretized by the trapezoid rule,
/// together with the instantaneous damping weight mu1.
struct DelayKernel
{
    double tau1 = 0;
    double tau2 = 0;
    double mu1 = 0;
    Vector nodes;    // tau_k
    Vector weights;  // trapezoid weights, summing to tau2 - tau1
    Vector mu2;      // mu2(tau_k) >= 0
    double mass = 0; // sum_k weights_k mu2_k

    Index size() const { return nodes.size(); }
    double width() const { return tau2 - tau1; }
};

using TauTable = std::vector<std::pair<double, double>>;

DelayKernel build_kernel(const std::function<double(double)>& mu2, double tau1, double tau2,
                         int n_tau, double mu1);

/// Tabulated density, linearly interpolated onto the trapezoid nodes.
/// The table must be sorted by tau and cover [tau1, tau2].
DelayKernel build_kernel(const TauTable& table, double tau1, double tau2, int n_tau, double mu1);

/// Strict delay mass condition: integral of mu2 < mu1.
bool check_mass_condition(const DelayKernel& kernel);

/// Positive weight xi(x) attached to the delay energy, one value per grid node.
struct XiField
{
    Vector values;

    XiField() = default;
    /// Throws ValidationError unless every value is finite and positive.
    explicit XiField(Vector v);
};

/// xi(x) = m(x) (mu1 - M) / (2 (tau2 - tau1)); DomainError when M >= mu1.
XiField xi_default(const DelayKernel& kernel, const ExponentField& m);

/// M + (tau2 - tau1) xi(x) / m(x) < mu1 at every node.
bool check_xi_condition(const DelayKernel& kernel, const XiField& xi, const ExponentField& m);

struct DissipationConstant
{
    double inf_f = 0;            // inf_x mu1 - M - (tau2 - tau1) xi / m
    double inf_xi_over_m = 0;    // inf_x xi / m
    double value = 0;            // min of the two; the rate constant actually guaranteed
    double literal_max = 0;      // max of the two, reported for comparison
};

DissipationConstant dissipation_constant(const DelayKernel& kernel, const XiField& xi,
                                         const ExponentField& m);

}  // namespace vexdelay
