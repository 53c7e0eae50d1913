#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vexdelay/solver.hpp"

namespace vexdelay
{

/// Lower bound on the life span: integral over [phi0, inf) of
/// dy / (c y^(p2-1) + c y^(p1-1) + y + E0).
///
/// Adaptive quadrature on [phi0, Y] plus the analytic tail Y^(2-p2) / (c (p2-2)),
/// with Y grown until the tail is below 1e-8 of the head.
double blowup_lower_bound(double phi0, double E0, double c, double p1, double p2,
                          double rel_tol = 1e-6);

/// Options of the randomized function family used to certify embedding constants.
struct EmbeddingFamily
{
    int samples = 10000;
    double safety = 2.0;
    std::uint64_t seed = 1;
    int max_frequency = 0;  // keep only members whose frequency tag is <= this (0: all)
};

struct EmbeddingEstimate
{
    double constant = 0;   // safety * sup_ratio
    double sup_ratio = 0;
    int members = 0;       // family members that entered the sup
};

/// Sup over the family of  scale * int |u|^q(x) / (g^high + g^low),  g = |grad_h u|_2.
struct EmbeddingTarget
{
    Vector exponent;
    double low_power = 2;
    double high_power = 2;
    double scale = 1;
};

EmbeddingEstimate certify_embedding(const Grid& grid, const EmbeddingTarget& target,
                                    const EmbeddingFamily& family = {});

/// Largest ratio of the target over an explicit list of grid functions (no safety factor).
double embedding_ratio(const Grid& grid, const EmbeddingTarget& target, const GridFunction& u);

/// Random members of the certification family, generated grid-independently from the seed.
struct FamilyMember
{
    GridFunction u;
    int frequency = 1;
};
std::vector<FamilyMember> embedding_family(const Grid& grid, int samples, std::uint64_t seed);

/// c with 1/2 int |u|^(2p-2) <= c (|grad u|^(2(p2-1)) + |grad u|^(2(p1-1))).
EmbeddingTarget lower_bound_target(const ExponentField& p);
double embedding_constant_for_bound(const Grid& grid, const ExponentField& p,
                                    const EmbeddingFamily& family = {});

/// c with int |u|^p <= c (|grad u|^p2 + |grad u|^p1), the constant of the smallness gate.
EmbeddingTarget gate_target(const ExponentField& p);

struct GateReport
{
    double I0 = 0;
    double E0 = 0;
    double beta = undefined;
    double threshold = 0;     // (p1 - 2) / (2 p1)
    double embedding = 0;     // c_p used in beta
    double poincare = 0;      // L2 Poincare constant, for reference
    bool positive_I0 = false;
    bool small_data = false;
    bool passed() const { return positive_I0 && small_data; }
};

GateReport global_existence_gate(const Model& model, const GridFunction& u0,
                                 const GridFunction& u1, double embedding_constant);

enum class DecayKind { exponential, polynomial };

struct DecayFitOptions
{
    double fit_from = undefined;   // default: midpoint of the trajectory's time span
    double fit_to = undefined;     // default: last sample
    double bound_from = undefined; // boundedness diagnostic window, default: whole run
    double bound_to = undefined;
};

struct DecayFit
{
    DecayKind kind = DecayKind::exponential;
    double rate = 0;        // alpha-hat (exponential) or the log-log slope (polynomial)
    double r_squared = 0;
    double boundedness = undefined;  // sup E (1+t)^(2/(m2-2)) / E(0), polynomial only
    double window_from = 0;
    double window_to = 0;
    int points = 0;
    std::string note;
};

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& E, double m2,
                   const DecayFitOptions& options = {});
DecayFit fit_decay(const Trajectory& trajectory, double m2, const DecayFitOptions& options = {});

/// Least-squares slope of L' (secant) against L^(1/(1-alpha)) through the origin.
double fit_blowup_rate(const Trajectory& trajectory, double alpha);

enum class Regime { blowup, global_decay, inconclusive };

const char* to_string(Regime regime);

struct ConditionFlags
{
    bool exponents = false;    // exponent chain
    bool log_holder = false;
    bool mass = false;         // M < mu1
    bool xi = false;           // xi condition
    bool negative_energy = false;
    bool small_data = false;
    bool positive_I0 = false;
};

struct RegimeVerdict
{
    Regime classification = Regime::inconclusive;
    double measured_blowup_time = undefined;
    double lower_bound = undefined;
    std::optional<bool> lower_bound_consistent;
    std::optional<DecayFit> decay;
    ConditionFlags flags;
};

/// blow-up iff the run crossed the threshold; global-decay iff it reached t_end with
/// E(t_end) <= decay_factor * E(0); otherwise inconclusive.
RegimeVerdict classify(const Trajectory& trajectory, double decay_factor = 1e-2,
                       double lower_bound = undefined);

}  // namespace vexdelay
