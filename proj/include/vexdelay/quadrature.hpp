#pragma once

#include <functional>

namespace vexdelay
{

struct QuadratureResult
{
    double value = 0;
    double error = 0;
    int intervals = 0;
    bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
///
/// Bisects the interval with the largest error estimate until the summed estimate
/// is below max(abs_tol, rel_tol * |value|) or max_intervals is reached.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-10, double abs_tol = 0.0,
                                    int max_intervals = 4000);

}  // namespace vexdelay
