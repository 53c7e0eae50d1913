#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "vexdelay/grid.hpp"

namespace vexdelay
{

/// |x|^q with cheap paths for the small integer exponents the presets use.
inline double abs_pow(double x, double q)
{
    const double a = std::abs(x);
    if (q == 0.0)
        return 1.0;
    if (q == 1.0)
        return a;
    if (q == 2.0)
        return a * a;
    if (q == 3.0)
        return a * a * a;
    if (q == 4.0) {
        const double a2 = a * a;
        return a2 * a2;
    }
    if (a == 0.0)
        return 0.0;
    return std::pow(a, q);
}

/// x |x|^(q-2), the odd extension of |x|^(q-1).
inline double odd_pow(double x, double q) { return x * abs_pow(x, q - 2.0); }

/// A variable exponent sampled at the nodes of a grid, with its essential bounds.
class ExponentField
{
public:
    ExponentField() = default;

    /// Throws ValidationError if any value is below 1 or not finite.
    ExponentField(const Grid& grid, Vector values);

    static ExponentField constant(const Grid& grid, double q);

    const Vector& values() const { return values_; }
    double operator()(Index node) const { return values_(node); }
    Index size() const { return values_.size(); }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    bool is_constant() const { return lower_ == upper_; }
    const std::array<int, 2>& shape() const { return shape_; }

private:
    Vector values_;
    double lower_ = 1.0;
    double upper_ = 1.0;
    std::array<int, 2> shape_{0, 0};
};

struct ValidationReport
{
    double m_lower = 0, m_upper = 0, p_lower = 0, p_upper = 0;
    bool damping_floor = false;  // 2 <= m1
    bool ordered = false;        // m1 <= m2 < p1 <= p2
    bool subcritical = false;    // p2 <= 2(n-1)/(n-2) for n >= 3, p2 finite otherwise
    double critical_cap = 0;     // +inf when n < 3

    double holder_constant = 0;  // A
    double holder_radius = 0;    // delta
    double m_holder_modulus = 0;
    double p_holder_modulus = 0;

    bool exponent_chain() const { return damping_floor && ordered && subcritical; }
    bool log_holder() const
    {
        return m_holder_modulus <= holder_constant && p_holder_modulus <= holder_constant;
    }
    bool passed() const { return exponent_chain() && log_holder(); }
    std::vector<std::string> failures() const;
};

/// Max over node pairs with |x - y| < delta of |q(x) - q(y)| |log|x - y||.
///
/// 2-D grids are strided down to at most 65 nodes per axis before the pair scan.
double log_holder_modulus(const Grid& grid, const ExponentField& q, double delta);

ValidationReport validate_exponent_pair(const Grid& grid, const ExponentField& m,
                                        const ExponentField& p, int dimension,
                                        double holder_constant = 10.0, double holder_radius = 0.5);

/// Trapezoid value of the modular, the integral of |u|^p(x).
double modular(const Grid& grid, const GridFunction& u, const ExponentField& p);

struct LuxemburgOptions
{
    double tolerance = 1e-13;
    int max_iterations = 400;
};

/// Luxemburg norm inf{lambda > 0 : modular(u / lambda) <= 1} by bisection.
double luxemburg_norm(const Grid& grid, const GridFunction& u, const ExponentField& p,
                      LuxemburgOptions options = {});

/// min(n^p1, n^p2) <= modular(u) <= max(n^p1, n^p2) for the Luxemburg norm n.
bool check_sandwich(const Grid& grid, const GridFunction& u, const ExponentField& p,
                    LuxemburgOptions options = {});

/// Discrete Dirichlet energy, sum over grid edges of cell area times squared difference quotient.
///
/// Equals -<u, laplacian(u)> in the trapezoid inner product for Dirichlet u.
double gradient_norm_squared(const Grid& grid, const GridFunction& u);

/// 1/sqrt(lambda_1) of the discrete Dirichlet Laplacian, by inverse power iteration.
double discrete_poincare_constant(const Grid& grid, double tolerance = 1e-10,
                                  int max_iterations = 500);

}  // namespace vexdelay
