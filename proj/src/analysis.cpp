#include "vexdelay/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "vexdelay/errors.hpp"
#include "vexdelay/quadrature.hpp"

namespace vexdelay
{

double blowup_lower_bound(double phi0, double E0, double c, double p1, double p2,
                          double rel_tol)
{
    if (!(p2 > 2.0))
        throw DomainError("lower-bound integral diverges for p2 <= 2");
    if (!(p1 <= p2))
        throw ValidationError("lower-bound integral needs p1 <= p2");
    if (!(c > 0.0) || !(phi0 >= 0.0) || !std::isfinite(phi0) || !std::isfinite(E0))
        throw ValidationError("lower-bound integral needs c > 0 and finite phi0 >= 0");

    const auto denominator = [=](double y) {
        return c * std::pow(y, p2 - 1.0) + c * std::pow(y, p1 - 1.0) + y + E0;
    };
    // The denominator is increasing in y, so positivity at phi0 settles the whole ray.
    if (!(denominator(phi0) > 0.0))
        throw DomainError("lower-bound integrand has a pole on [phi0, inf)");

    const auto integrand = [&](double y) { return 1.0 / denominator(y); };
    const auto tail = [=](double y) { return std::pow(y, 2.0 - p2) / (c * (p2 - 2.0)); };

    double head = 0.0;
    double a = phi0;
    double y = std::max(1.0, 2.0 * phi0);
    for (int segment = 0; segment < 2000; ++segment) {
        const QuadratureResult piece = integrate_adaptive(integrand, a, y, 1e-3 * rel_tol);
        if (!piece.converged)
            throw NumericalError("lower-bound quadrature did not converge", a, y);
        head += piece.value;
        if (tail(y) <= 1e-8 * head)
            return head + tail(y);
        a = y;
        y *= 4.0;
    }
    throw NumericalError("lower-bound tail did not become negligible", phi0, y);
}

namespace
{

/// Portable generator: mt19937_64 bits mapped without std distributions.
class Random
{
public:
    explicit Random(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return lo + int(uniform() * (hi - lo + 1)); }
    double normal()
    {
        const double a = 1.0 - uniform();
        const double b = uniform();
        return std::sqrt(-2.0 * std::log(a)) * std::cos(2.0 * std::numbers::pi * b);
    }

private:
    std::mt19937_64 engine_;
};

double hat(double r) { return std::max(0.0, 1.0 - std::abs(r)); }

double smooth_bump(double r)
{
    if (std::abs(r) >= 1.0)
        return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * r);
    return c * c;
}

}  // namespace

std::vector<FamilyMember> embedding_family(const Grid& grid, int samples, std::uint64_t seed)
{
    Random rng(seed);
    const bool planar = grid.dimension() == 2;
    const double lx = grid.extent(0);
    const double ly = planar ? grid.extent(1) : 1.0;
    const double min_width =
        2.0 * std::max(grid.spacing(0) / lx, planar ? grid.spacing(1) / ly : 0.0);

    std::vector<FamilyMember> family;
    family.reserve(std::size_t(samples));
    for (int s = 0; s < samples; ++s) {
        const int kind = rng.integer(0, 2);
        const double amplitude = std::pow(10.0, rng.uniform(-3.0, 3.0));
        FamilyMember member;
        if (kind == 0) {
            // Low-mode sine sums with algebraically decaying coefficients.
            const int modes = rng.integer(1, 8);
            const double decay = rng.uniform(0.0, 2.0);
            const auto count = static_cast<std::size_t>(modes);
            std::vector<int> kx(count), ky(count);
            std::vector<double> coef(count);
            for (int k = 0; k < modes; ++k) {
                kx[std::size_t(k)] = planar ? rng.integer(1, modes) : k + 1;
                ky[std::size_t(k)] = planar ? rng.integer(1, modes) : 0;
                coef[std::size_t(k)] = rng.normal() / std::pow(double(k + 1), decay);
            }
            member.frequency = modes;
            member.u = grid.sample([&](double x, double y) {
                double sum = 0.0;
                for (std::size_t k = 0; k < coef.size(); ++k) {
                    double term = coef[k] * std::sin(kx[k] * std::numbers::pi * x / lx);
                    if (planar)
                        term *= std::sin(ky[k] * std::numbers::pi * y / ly);
                    sum += term;
                }
                return amplitude * sum;
            });
        } else {
            // Localized bumps, from a few cells wide up to half the domain.
            const double cx = rng.uniform(0.0, 1.0);
            const double cy = rng.uniform(0.0, 1.0);
            const double width =
                std::max(min_width, std::pow(10.0, rng.uniform(std::log10(0.005), std::log10(0.5))));
            member.frequency = int(std::ceil(1.0 / width));
            const bool sharp = kind == 1;
            member.u = grid.sample([&](double x, double y) {
                const double rx = (x / lx - cx) / width;
                double value = sharp ? hat(rx) : smooth_bump(rx);
                if (planar) {
                    const double ry = (y / ly - cy) / width;
                    value *= sharp ? hat(ry) : smooth_bump(ry);
                }
                return amplitude * value;
            });
        }
        grid.apply_dirichlet(member.u);
        family.push_back(std::move(member));
    }
    return family;
}

double embedding_ratio(const Grid& grid, const EmbeddingTarget& target, const GridFunction& u)
{
    const double g = std::sqrt(gradient_norm_squared(grid, u));
    if (!(g > 0.0))
        return 0.0;
    const Vector& w = grid.weights();
    double num = 0.0;
    for (Index i = 0; i < u.size(); ++i)
        num += w(i) * abs_pow(u(i), target.exponent(i));
    const double den = std::pow(g, target.high_power) + std::pow(g, target.low_power);
    return target.scale * num / den;
}

EmbeddingEstimate certify_embedding(const Grid& grid, const EmbeddingTarget& target,
                                    const EmbeddingFamily& family)
{
    require_size(grid, target.exponent, "embedding exponent");
    if (family.samples < 1 || !(family.safety > 0.0))
        throw ValidationError("embedding family needs samples >= 1 and a positive safety factor");
    EmbeddingEstimate est;
    for (const FamilyMember& member : embedding_family(grid, family.samples, family.seed)) {
        if (family.max_frequency > 0 && member.frequency > family.max_frequency)
            continue;
        ++est.members;
        est.sup_ratio = std::max(est.sup_ratio, embedding_ratio(grid, target, member.u));
    }
    est.constant = family.safety * est.sup_ratio;
    return est;
}

EmbeddingTarget lower_bound_target(const ExponentField& p)
{
    EmbeddingTarget t;
    t.exponent = (2.0 * p.values().array() - 2.0).matrix();
    t.low_power = 2.0 * (p.lower() - 1.0);
    t.high_power = 2.0 * (p.upper() - 1.0);
    t.scale = 0.5;
    return t;
}

double embedding_constant_for_bound(const Grid& grid, const ExponentField& p,
                                    const EmbeddingFamily& family)
{
    return certify_embedding(grid, lower_bound_target(p), family).constant;
}

EmbeddingTarget gate_target(const ExponentField& p)
{
    EmbeddingTarget t;
    t.exponent = p.values();
    t.low_power = p.lower();
    t.high_power = p.upper();
    t.scale = 1.0;
    return t;
}

GateReport global_existence_gate(const Model& model, const GridFunction& u0,
                                 const GridFunction& u1, double embedding_constant)
{
    const SimState state = init_state(model, u0, u1);
    const EnergyReport r = energy_report(model, state);
    const double p1 = model.p.lower();
    const double p2 = model.p.upper();

    GateReport g;
    g.I0 = r.I;
    g.E0 = r.E;
    g.embedding = embedding_constant;
    g.poincare = discrete_poincare_constant(model.grid);
    g.threshold = (p1 - 2.0) / (2.0 * p1);
    g.positive_I0 = r.I > 0.0;
    if (r.E >= 0.0 && p1 > 2.0) {
        const double base = 2.0 * p1 / (p1 - 2.0) * r.E;
        g.beta = embedding_constant *
                 (std::pow(base, 0.5 * (p2 - 2.0)) + std::pow(base, 0.5 * (p1 - 2.0)));
        g.small_data = g.beta < g.threshold;
    }
    return g;
}

namespace
{

struct LineFit
{
    double slope = 0;
    double r_squared = 1;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    const double ss_res = syy - f.slope * sxy;
    f.r_squared = syy > 0 ? 1.0 - std::max(0.0, ss_res) / syy : 1.0;
    return f;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& E, double m2,
                   const DecayFitOptions& options)
{
    if (t.size() != E.size() || t.empty())
        throw DomainError("decay fit needs matching, nonempty series");
    const double E0 = E.front();
    const double floor = std::numeric_limits<double>::epsilon() * std::abs(E0);

    DecayFit fit;
    fit.kind = std::abs(m2 - 2.0) < 1e-12 ? DecayKind::exponential : DecayKind::polynomial;
    fit.window_from = std::isnan(options.fit_from) ? 0.5 * (t.front() + t.back()) : options.fit_from;
    fit.window_to = std::isnan(options.fit_to) ? t.back() : options.fit_to;

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < fit.window_from || t[i] > fit.window_to)
            continue;
        if (!(E[i] > floor)) {
            fit.window_to = xs.empty() ? fit.window_from : t[i - 1];
            fit.note = "window shrunk: energy reached the round-off floor at t = " +
                       std::to_string(t[i]);
            break;
        }
        xs.push_back(fit.kind == DecayKind::exponential ? t[i] : std::log1p(t[i]));
        ys.push_back(std::log(E[i]));
    }
    fit.points = int(xs.size());
    if (xs.size() < 2)
        throw DomainError("decay fit window holds fewer than two usable samples");

    const LineFit line = least_squares(xs, ys);
    fit.r_squared = line.r_squared;
    fit.rate = fit.kind == DecayKind::exponential ? -line.slope : line.slope;

    if (fit.kind == DecayKind::polynomial && E0 > 0.0) {
        const double power = 2.0 / (m2 - 2.0);
        const double lo = std::isnan(options.bound_from) ? t.front() : options.bound_from;
        const double hi = std::isnan(options.bound_to) ? t.back() : options.bound_to;
        double sup = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] >= lo && t[i] <= hi)
                sup = std::max(sup, E[i] * std::pow(1.0 + t[i], power));
        fit.boundedness = sup / E0;
    }
    return fit;
}

DecayFit fit_decay(const Trajectory& trajectory, double m2, const DecayFitOptions& options)
{
    std::vector<double> t, E;
    for (const Sample& s : trajectory.samples) {
        t.push_back(s.report.t);
        E.push_back(s.report.E);
    }
    return fit_decay(t, E, m2, options);
}

double fit_blowup_rate(const Trajectory& trajectory, double alpha)
{
    double num = 0, den = 0;
    const auto& s = trajectory.samples;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double a = s[i].report.L;
        const double b = s[i + 1].report.L;
        const double dt = s[i + 1].report.t - s[i].report.t;
        if (!(a > 0.0) || !(b > 0.0) || !(dt > 0.0))
            continue;
        const double slope = (b - a) / dt;
        const double x = std::pow(0.5 * (a + b), 1.0 / (1.0 - alpha));
        num += slope * x;
        den += x * x;
    }
    return den > 0.0 ? num / den : undefined;
}

const char* to_string(Regime regime)
{
    switch (regime) {
    case Regime::blowup:
        return "blow-up";
    case Regime::global_decay:
        return "global-decay";
    case Regime::inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

RegimeVerdict classify(const Trajectory& trajectory, double decay_factor, double lower_bound)
{
    RegimeVerdict v;
    v.lower_bound = lower_bound;
    if (trajectory.termination == Termination::blowup_threshold) {
        v.classification = Regime::blowup;
        v.measured_blowup_time = trajectory.end_time;
        if (std::isfinite(lower_bound))
            v.lower_bound_consistent = v.measured_blowup_time >= lower_bound;
        return v;
    }
    if (trajectory.termination == Termination::reached_end && !trajectory.samples.empty()) {
        const double E0 = trajectory.samples.front().report.E;
        const double E1 = trajectory.samples.back().report.E;
        if (E0 >= 0.0 && E1 <= decay_factor * E0)
            v.classification = Regime::global_decay;
    }
    return v;
}

}  // namespace vexdelay
