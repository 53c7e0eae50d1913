#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "vexdelay/delay.hpp"
#include "vexdelay/expression.hpp"
#include "vexdelay/state.hpp"

namespace vexdelay
{

/// Fully resolved run configuration. Expressions are kept as text.
struct RunConfig
{
    // [grid]
    int dim = 1;
    double extent = 1;
    int nodes = 101;
    double extent_y = 1;
    int nodes_y = 0;  // 0: same as nodes

    // [exponents]
    std::string m = "2";
    std::string p = "4";
    double log_holder_A = 10;
    double log_holder_delta = 0.5;

    // [delay]
    double mu1 = 1;
    std::string mu2 = "0";
    TauTable mu2_table;  // used instead of mu2 when nonempty
    double tau1 = 1;
    double tau2 = 2;
    int n_tau = 16;
    std::string xi = "auto";

    // [initial]
    std::string u0 = "0";
    std::string u1 = "0";
    std::string f0 = "0";
    double scale = 1;  // multiplies u0, u1 and f0

    // [run]
    double t_end = 10;
    std::optional<double> dt;  // empty: auto CFL
    int n_rho = 32;
    double threshold = 1e6;
    bool override_conditions = false;
    bool conservative = false;
    bool disable_source = false;
    bool freeze_velocity = false;
    double decay_factor = 1e-2;
    std::optional<double> alpha;    // empty: half of the admissible window
    std::optional<double> epsilon;  // empty: default_epsilon
    double dissipation_slack = 50;  // tolerance in units of dt

    // [output]
    double cadence = 0;  // time between samples; 0: every step
    int embedding_samples = 10000;
    double embedding_safety = 2;
    std::uint64_t seed = 1;

    bool operator==(const RunConfig&) const = default;
};

/// Parses the sectioned key = value document. Throws ConfigError.
RunConfig parse_config(const std::string& text);

/// Canonical text: every key, fixed order, shortest round-trip numbers.
std::string serialize_config(const RunConfig& config);

/// Sets one "section.key" from its text form, then re-validates. Throws ConfigError.
void assign_key(RunConfig& config, const std::string& dotted_key, const std::string& value);

/// FNV-1a of the canonical serialization.
std::string config_hash(const RunConfig& config);

/// Discrete objects built from a configuration.
struct Setup
{
    Model model;
    GridFunction u0;
    GridFunction u1;
    bool mass_condition = false;
    bool xi_condition = false;
    bool xi_defaulted = false;  // xi fell back to zero (conservative or mass condition violated)
};

/// Samples every expression on the grid. Throws ConfigError on evaluation failures.
Setup build_setup(const RunConfig& config);

}  // namespace vexdelay
