#pragma once

#include <limits>

#include "vexdelay/state.hpp"

namespace vexdelay
{

inline constexpr double undefined = std::numeric_limits<double>::quiet_NaN();

/// Parameters of the blow-up functional L = H^(1 - alpha) + eps * integral(u v).
/// A NaN alpha means L is not evaluated; a NaN epsilon asks run() for default_epsilon.
struct LyapunovParameters
{
    double alpha = undefined;
    double epsilon = undefined;
};

/// Scalar functionals of one state.
struct EnergyReport
{
    double t = 0;
    double kinetic = 0;           // 1/2 |v|^2
    double elastic = 0;           // 1/2 |grad u|^2
    double delay_energy = 0;      // int int int tau (mu2 + xi) |z|^m / m
    double source_potential = 0;  // int |u|^p / p
    double E = 0;
    double H = 0;
    double I = 0;
    double J = 0;
    double F = 0;                 // delay energy with the extra weight exp(-rho tau)
    double L = undefined;
    double phi = 0;
    double damping_modular = 0;   // int |v|^m
    double delay_modular = 0;     // int int |z(., 1, .)|^m
    double source_modular = 0;    // int |u|^p
    double delay_bulk = 0;        // int int int (mu2 + xi) |z|^m
    double cross = 0;             // int u v
};

EnergyReport energy_report(const Model& model, const SimState& state,
                           const LyapunovParameters& lyapunov = {});

/// F alone, for callers that do not need the full report.
double weighted_delay_functional(const Model& model, const SimState& state);

struct DissipationVerdict
{
    double rate = 0;       // (E1 - E0) / (t1 - t0)
    double bound = 0;      // -C0 times the midpoint damping plus delay modulars
    double tolerance = 0;
    bool applicable = true;
    bool holds = true;
};

/// Compares the secant slope of E to the dissipation bound. Not applicable when
/// the dissipation constant is not positive (damping switched off).
DissipationVerdict dissipation_check(const EnergyReport& before, const EnergyReport& after,
                                     double dissipation_rate_constant, double tolerance);

/// min{(p1 - 2) / (2 p1), (p1 - m2) / (p1 (m2 - 1))}; DomainError if not positive.
double alpha_window(const ExponentField& m, const ExponentField& p);

/// H^(1 - alpha) + eps * cross, or NaN when H <= 0.
double blowup_functional(double H, double cross, double alpha, double epsilon);

/// Largest eps for which |eps int u0 u1| <= H0^(1 - alpha) / 2 is guaranteed by
/// Cauchy-Schwarz, so L(0) >= H0^(1 - alpha) / 2 > 0.
double default_epsilon(double H0, double u_norm_sq, double v_norm_sq, double alpha);

/// Constants of the weighted delay inequality F' <= a1 int |v|^m - a2 int (mu2 + xi) |z|^m.
struct WeightedDelayConstants
{
    double alpha1 = 0;
    double alpha2 = 0;
};

WeightedDelayConstants weighted_delay_constants(const DelayKernel& kernel, const Vector& xi,
                                                const ExponentField& m);

}  // namespace vexdelay
