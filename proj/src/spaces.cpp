#include "vexdelay/spaces.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "vexdelay/errors.hpp"

namespace vexdelay
{

ExponentField::ExponentField(const Grid& grid, Vector values) : values_(std::move(values))
{
    require_size(grid, values_, "exponent field");
    for (Index k = 0; k < values_.size(); ++k)
        if (!std::isfinite(values_(k)) || values_(k) < 1.0)
            throw ValidationError("exponent values must be finite and >= 1");
    lower_ = values_.minCoeff();
    upper_ = values_.maxCoeff();
    shape_ = {grid.nodes(0), grid.nodes(1)};
}

ExponentField ExponentField::constant(const Grid& grid, double q)
{
    return ExponentField(grid, Vector::Constant(grid.size(), q));
}

std::vector<std::string> ValidationReport::failures() const
{
    std::vector<std::string> out;
    if (!damping_floor)
        out.emplace_back("damping exponent lower bound m1 >= 2 violated");
    if (!ordered)
        out.emplace_back("exponent ordering m2 < p1 violated");
    if (!subcritical)
        out.emplace_back("source exponent exceeds the critical cap");
    if (m_holder_modulus > holder_constant)
        out.emplace_back("m fails the log-Holder estimate");
    if (p_holder_modulus > holder_constant)
        out.emplace_back("p fails the log-Holder estimate");
    return out;
}

double log_holder_modulus(const Grid& grid, const ExponentField& q, double delta)
{
    require_size(grid, q.values(), "log-Holder field");
    int stride_x = 1;
    int stride_y = 1;
    if (grid.dimension() == 2) {
        stride_x = std::max(1, (grid.nodes(0) - 1) / 64);
        stride_y = std::max(1, (grid.nodes(1) - 1) / 64);
    }
    std::vector<Index> nodes;
    for (int j = 0; j < grid.nodes(1); j += stride_y)
        for (int i = 0; i < grid.nodes(0); i += stride_x)
            nodes.push_back(i + Index(grid.nodes(0)) * j);

    double best = 0.0;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        const double xa = grid.coordinate(nodes[a], 0);
        const double ya = grid.coordinate(nodes[a], 1);
        for (std::size_t b = a + 1; b < nodes.size(); ++b) {
            const double dx = grid.coordinate(nodes[b], 0) - xa;
            const double dy = grid.coordinate(nodes[b], 1) - ya;
            const double dist = std::sqrt(dx * dx + dy * dy);
            if (dist >= delta || dist == 0.0)
                continue;
            const double jump = std::abs(q(nodes[a]) - q(nodes[b]));
            best = std::max(best, jump * std::abs(std::log(dist)));
        }
    }
    return best;
}

ValidationReport validate_exponent_pair(const Grid& grid, const ExponentField& m,
                                        const ExponentField& p, int dimension,
                                        double holder_constant, double holder_radius)
{
    if (grid.size() == 0)
        throw StructuralError("empty grid");
    if (m.shape() != p.shape() || m.size() != grid.size())
        throw StructuralError("exponent fields live on different grids");
    if (!(holder_radius > 0.0 && holder_radius < 1.0) || !(holder_constant > 0.0))
        throw ValidationError("log-Holder check needs A > 0 and 0 < delta < 1");

    ValidationReport r;
    r.m_lower = m.lower();
    r.m_upper = m.upper();
    r.p_lower = p.lower();
    r.p_upper = p.upper();
    r.damping_floor = r.m_lower >= 2.0;
    r.ordered = r.m_lower <= r.m_upper && r.m_upper < r.p_lower && r.p_lower <= r.p_upper;
    if (dimension >= 3) {
        r.critical_cap = 2.0 * (dimension - 1) / (dimension - 2.0);
        r.subcritical = r.p_upper <= r.critical_cap;
    } else {
        r.critical_cap = std::numeric_limits<double>::infinity();
        r.subcritical = std::isfinite(r.p_upper);
    }
    r.holder_constant = holder_constant;
    r.holder_radius = holder_radius;
    r.m_holder_modulus = log_holder_modulus(grid, m, holder_radius);
    r.p_holder_modulus = log_holder_modulus(grid, p, holder_radius);
    return r;
}

double modular(const Grid& grid, const GridFunction& u, const ExponentField& p)
{
    require_size(grid, u, "modular");
    require_size(grid, p.values(), "modular exponent");
    const Vector& w = grid.weights();
    double sum = 0.0;
    for (Index k = 0; k < u.size(); ++k)
        sum += w(k) * abs_pow(u(k), p(k));
    return sum;
}

double luxemburg_norm(const Grid& grid, const GridFunction& u, const ExponentField& p,
                      LuxemburgOptions options)
{
    if (!(options.tolerance > 0.0))
        throw ValidationError("Luxemburg tolerance must be positive");
    const double rho = modular(grid, u, p);
    if (rho == 0.0)
        return 0.0;

    auto excess = [&](double lambda) {
        double sum = 0.0;
        const Vector& w = grid.weights();
        for (Index k = 0; k < u.size(); ++k)
            sum += w(k) * abs_pow(u(k) / lambda, p(k));
        return sum - 1.0;
    };

    // The sandwich inequality pins the root between rho^(1/p2) and rho^(1/p1).
    double lo = std::pow(rho, 1.0 / (rho >= 1.0 ? p.upper() : p.lower()));
    double hi = std::pow(rho, 1.0 / (rho >= 1.0 ? p.lower() : p.upper()));
    lo *= 1.0 - 1e-12;
    hi *= 1.0 + 1e-12;
    for (int grow = 0; excess(lo) < 0.0 && grow < 64; ++grow)
        lo *= 0.5;
    for (int grow = 0; excess(hi) > 0.0 && grow < 64; ++grow)
        hi *= 2.0;

    for (int it = 0; it < options.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = excess(mid);
        if (std::abs(f) <= options.tolerance)
            return mid;
        if (f > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
            return 0.5 * (lo + hi);
    }
    throw NumericalError("Luxemburg bisection did not converge", lo, hi);
}

bool check_sandwich(const Grid& grid, const GridFunction& u, const ExponentField& p,
                    LuxemburgOptions options)
{
    const double rho = modular(grid, u, p);
    const double norm = luxemburg_norm(grid, u, p, options);
    const double a = std::pow(norm, p.lower());
    const double b = std::pow(norm, p.upper());
    // Slack from the solver tolerance propagated through the power map.
    const double slack = options.tolerance * std::max(1.0, rho) +
                         64.0 * std::numeric_limits<double>::epsilon() * std::max(a, b);
    return std::min(a, b) <= rho + slack && rho <= std::max(a, b) + slack;
}

double gradient_norm_squared(const Grid& grid, const GridFunction& u)
{
    require_size(grid, u, "gradient");
    const int nx = grid.nodes(0);
    const int ny = grid.nodes(1);
    const double hx = grid.spacing(0);
    double sum = 0.0;
    if (grid.dimension() == 1) {
        for (int i = 0; i + 1 < nx; ++i) {
            const double d = u(i + 1) - u(i);
            sum += d * d;
        }
        return sum / hx;
    }
    const double hy = grid.spacing(1);
    double sx = 0.0;
    double sy = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const Index k = i + Index(nx) * j;
            if (i + 1 < nx) {
                const double d = u(k + 1) - u(k);
                sx += d * d;
            }
            if (j + 1 < ny) {
                const double d = u(k + nx) - u(k);
                sy += d * d;
            }
        }
    return sx * hy / hx + sy * hx / hy;
}

double discrete_poincare_constant(const Grid& grid, double tolerance, int max_iterations)
{
    const int nx = grid.nodes(0);
    const int ny = grid.dimension() == 2 ? grid.nodes(1) : 1;
    const int ix = nx - 2;
    const int iy = grid.dimension() == 2 ? ny - 2 : 1;
    const Index n = Index(ix) * iy;
    const double cx = 1.0 / (grid.spacing(0) * grid.spacing(0));
    const double cy = grid.dimension() == 2 ? 1.0 / (grid.spacing(1) * grid.spacing(1)) : 0.0;

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(std::size_t(n) * 5);
    for (int j = 0; j < iy; ++j)
        for (int i = 0; i < ix; ++i) {
            const Index k = i + Index(ix) * j;
            entries.emplace_back(k, k, 2.0 * cx + 2.0 * cy);
            if (i > 0)
                entries.emplace_back(k, k - 1, -cx);
            if (i + 1 < ix)
                entries.emplace_back(k, k + 1, -cx);
            if (grid.dimension() == 2) {
                if (j > 0)
                    entries.emplace_back(k, k - ix, -cy);
                if (j + 1 < iy)
                    entries.emplace_back(k, k + ix, -cy);
            }
        }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(entries.begin(), entries.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
        throw NumericalError("factorization of the discrete Laplacian failed");

    // Positive start vector has a nonzero component along the positive ground state.
    Vector x = Vector::Ones(n);
    double lambda = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        x = solver.solve(x);
        x.normalize();
        const double next = x.dot(A * x);
        if (it > 0 && std::abs(next - lambda) <= tolerance * next)
            return 1.0 / std::sqrt(next);
        lambda = next;
    }
    throw NumericalError("inverse power iteration did not converge", lambda, lambda);
}

}  // namespace vexdelay
