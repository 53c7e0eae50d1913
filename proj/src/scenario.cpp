#include "vexdelay/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <future>
#include <sstream>
#include <thread>

#include "vexdelay/errors.hpp"
#include "vexdelay/format.hpp"

namespace vexdelay
{

using json = nlohmann::ordered_json;

namespace
{

json number(double v)
{
    if (std::isfinite(v))
        return v;
    return nullptr;
}

json config_echo(const RunConfig& config)
{
    json echo = json::object();
    std::istringstream in(serialize_config(config));
    std::string line, section;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            echo[section] = json::object();
            continue;
        }
        const auto eq = line.find(" = ");
        echo[section][line.substr(0, eq)] = line.substr(eq + 3);
    }
    return echo;
}

json error_object(const char* kind, const std::string& message)
{
    return json{{"kind", kind}, {"message", message}};
}

const char* config_kind(ConfigError::Kind kind)
{
    switch (kind) {
    case ConfigError::Kind::parse: return "config-parse";
    case ConfigError::Kind::range: return "config-range";
    case ConfigError::Kind::expression: return "config-expression";
    case ConfigError::Kind::unknown_key: return "config-unknown-key";
    case ConfigError::Kind::missing_key: return "config-missing-key";
    }
    return "config";
}

struct Conditions
{
    ValidationReport exponents;
    bool mass = false;
    bool xi = false;
    double mass_value = 0;
    DissipationConstant c0;
    bool c0_defined = false;
};

Conditions check_conditions(const RunConfig& config, const Setup& setup)
{
    const Model& model = setup.model;
    Conditions c;
    c.exponents = validate_exponent_pair(model.grid, model.m, model.p, model.grid.dimension(),
                                         config.log_holder_A, config.log_holder_delta);
    c.mass = setup.mass_condition;
    c.xi = setup.xi_condition;
    c.mass_value = model.kernel.mass;
    if (c.xi) {
        c.c0 = dissipation_constant(model.kernel, XiField(model.xi), model.m);
        c.c0_defined = true;
    }
    return c;
}

json conditions_json(const RunConfig& config, const Conditions& c, const ConditionFlags& flags,
                     const GateReport& gate)
{
    const ValidationReport& e = c.exponents;
    json j;
    j["exponent_chain"] = e.exponent_chain();
    j["log_holder"] = e.log_holder();
    j["m_range"] = {e.m_lower, e.m_upper};
    j["p_range"] = {e.p_lower, e.p_upper};
    j["m_holder_modulus"] = e.m_holder_modulus;
    j["p_holder_modulus"] = e.p_holder_modulus;
    j["holder_constant"] = e.holder_constant;
    j["mass_condition"] = c.mass;
    j["delay_mass"] = c.mass_value;
    j["mu1"] = config.mu1;
    j["xi_condition"] = c.xi;
    j["C0"] = c.c0_defined ? number(c.c0.value) : json(nullptr);
    j["C0_literal_max"] = c.c0_defined ? number(c.c0.literal_max) : json(nullptr);
    j["negative_energy"] = flags.negative_energy;
    j["positive_I0"] = flags.positive_I0;
    j["small_data"] = flags.small_data;
    j["gate_beta"] = number(gate.beta);
    j["gate_threshold"] = gate.threshold;
    j["gate_embedding_constant"] = gate.embedding;
    j["poincare_constant"] = gate.poincare;
    j["overridden"] = config.override_conditions;
    return j;
}

bool required_conditions(const RunConfig& config, const Conditions& c)
{
    if (config.conservative)
        return c.exponents.exponent_chain();
    return c.exponents.exponent_chain() && c.mass && c.xi;
}

}  // namespace

ScenarioResult run_scenario(const RunConfig& config)
{
    const auto started = std::chrono::steady_clock::now();
    ScenarioResult result;
    json& summary = result.summary;
    summary["config_hash"] = config_hash(config);
    summary["config"] = config_echo(config);

    const auto finish = [&](int code) {
        result.exit_code = code;
        summary["exit_code"] = code;
        result.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return result;
    };

    Setup setup;
    try {
        setup = build_setup(config);
    } catch (const ConfigError& e) {
        summary["error"] = error_object(config_kind(e.kind), e.what());
        return finish(exit_config_error);
    } catch (const std::exception& e) {
        summary["error"] = error_object("config-range", e.what());
        return finish(exit_config_error);
    }
    const Model& model = setup.model;
    summary["dt"] = model.dt;

    try {
        const Conditions conditions = check_conditions(config, setup);
        const double p1 = model.p.lower();
        const double p2 = model.p.upper();

        EmbeddingFamily family;
        family.samples = config.embedding_samples;
        family.safety = config.embedding_safety;
        family.seed = config.seed;
        const double c_gate = certify_embedding(model.grid, gate_target(model.p), family).constant;
        const GateReport gate = global_existence_gate(model, setup.u0, setup.u1, c_gate);

        ConditionFlags flags;
        flags.exponents = conditions.exponents.exponent_chain();
        flags.log_holder = conditions.exponents.log_holder();
        flags.mass = conditions.mass;
        flags.xi = conditions.xi;
        flags.negative_energy = gate.E0 < 0;
        flags.small_data = gate.small_data;
        flags.positive_I0 = gate.positive_I0;
        summary["conditions"] = conditions_json(config, conditions, flags, gate);

        if (!required_conditions(config, conditions) && !config.override_conditions) {
            std::string which;
            if (!flags.exponents)
                which += " exponent-chain";
            if (!config.conservative && !flags.mass)
                which += " delay-mass";
            if (!config.conservative && !flags.xi)
                which += " xi";
            summary["error"] =
                error_object("condition-failure", "conditions violated:" + which +
                                                      " (rerun with --override-conditions)");
            return finish(exit_condition_failure);
        }

        RunOptions options;
        options.t_end = config.t_end;
        options.threshold = config.threshold;
        options.sample_every =
            config.cadence > 0 ? std::max(1, int(std::llround(config.cadence / model.dt))) : 1;
        double alpha = undefined;
        try {
            const double window = alpha_window(model.m, model.p);
            alpha = config.alpha ? std::min(*config.alpha, window) : 0.5 * window;
        } catch (const DomainError&) {
        }
        options.lyapunov.alpha = alpha;
        options.lyapunov.epsilon = config.epsilon ? *config.epsilon : undefined;

        result.trajectory = run(model, setup.u0, setup.u1, options);
        const Trajectory& traj = result.trajectory;
        std::ostringstream csv;
        write_trajectory_csv(csv, traj);
        result.csv = csv.str();

        double lower_bound = undefined;
        json lower_bound_note = nullptr;
        double c_bound = undefined;
        if (traj.termination == Termination::blowup_threshold && p2 > 2) {
            c_bound = std::pow(2.0, p2 - 1.0) *
                      embedding_constant_for_bound(model.grid, model.p, family);
            const EnergyReport& r0 = traj.samples.front().report;
            try {
                lower_bound = blowup_lower_bound(r0.phi, r0.E, c_bound, p1, p2);
            } catch (const std::exception& e) {
                lower_bound_note = e.what();
            }
        }

        RegimeVerdict& verdict = result.verdict;
        verdict = classify(traj, config.decay_factor, lower_bound);
        verdict.flags = flags;
        const double m2 = model.m.upper();
        if (traj.termination == Termination::reached_end && traj.samples.front().report.E > 0) {
            try {
                verdict.decay = fit_decay(traj, m2);
            } catch (const DomainError&) {
            }
        }

        summary["termination"] = to_string(traj.termination);
        summary["classification"] = to_string(verdict.classification);
        summary["end_time"] = traj.end_time;
        summary["samples"] = traj.samples.size();
        summary["T_measured"] = number(verdict.measured_blowup_time);
        summary["T_low"] = number(lower_bound);
        summary["T_low_constant"] = number(c_bound);
        if (!lower_bound_note.is_null())
            summary["T_low_note"] = lower_bound_note;
        summary["lower_bound_consistent"] =
            verdict.lower_bound_consistent ? json(*verdict.lower_bound_consistent) : json(nullptr);

        json fit = nullptr;
        if (verdict.decay) {
            const DecayFit& d = *verdict.decay;
            fit = json::object();
            fit["kind"] = d.kind == DecayKind::exponential ? "exponential" : "polynomial";
            fit["rate"] = number(d.rate);
            fit["r_squared"] = number(d.r_squared);
            fit["boundedness"] = number(d.boundedness);
            fit["window"] = {d.window_from, d.window_to};
            fit["points"] = d.points;
            if (!d.note.empty())
                fit["note"] = d.note;
        }
        summary["decay_fit"] = fit;
        summary["alpha"] = number(traj.lyapunov.alpha);
        summary["epsilon"] = number(traj.lyapunov.epsilon);
        summary["blowup_rate_fit"] = std::isfinite(alpha) && verdict.classification == Regime::blowup
                                         ? number(fit_blowup_rate(traj, alpha))
                                         : json(nullptr);

        double e_min = traj.samples.front().report.E, e_max = e_min, sup_max = 0;
        for (const Sample& s : traj.samples) {
            e_min = std::min(e_min, s.report.E);
            e_max = std::max(e_max, s.report.E);
            sup_max = std::max(sup_max, s.sup_u);
        }
        summary["energy"] = {{"E0", traj.samples.front().report.E},
                             {"E_final", traj.samples.back().report.E},
                             {"E_min", e_min},
                             {"E_max", e_max},
                             {"sup_u_max", sup_max}};

        int pairs = 0, holding = 0;
        if (conditions.c0_defined) {
            for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
                const DissipationVerdict d =
                    dissipation_check(traj.samples[i].report, traj.samples[i + 1].report,
                                      conditions.c0.value, config.dissipation_slack * model.dt);
                ++pairs;
                holding += d.holds ? 1 : 0;
            }
        }
        summary["dissipation"] = {{"pairs", pairs}, {"holding", holding}};
        json warnings = json::array();
        if (!traj.warning.empty())
            warnings.push_back(traj.warning);
        if (setup.xi_defaulted && !config.conservative)
            warnings.push_back("delay mass condition violated: xi set to zero");
        summary["warnings"] = warnings;

        if (traj.termination == Termination::numerical_overflow) {
            summary["error"] = error_object("numerical-overflow",
                                            "non-finite state at t = " + format_number(traj.end_time));
            return finish(exit_numerical_failure);
        }
        return finish(exit_success);
    } catch (const NumericalError& e) {
        summary["error"] = error_object("numerical", e.what());
        return finish(exit_numerical_failure);
    } catch (const ConfigError& e) {
        summary["error"] = error_object(config_kind(e.kind), e.what());
        return finish(exit_config_error);
    } catch (const std::exception& e) {
        summary["error"] = error_object("numerical", e.what());
        return finish(exit_numerical_failure);
    }
}

void write_outputs(const ScenarioResult& result, const std::string& dir)
{
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    if (!result.csv.empty())
        write_file_atomic((base / "trajectory.csv").string(), result.csv);
    write_file_atomic((base / "summary.json").string(), result.summary.dump(2) + "\n");
    json timing = {{"wall_seconds", result.wall_seconds}};
    write_file_atomic((base / "timing.json").string(), timing.dump(2) + "\n");
}

namespace
{

/// Numeric values sort numerically, anything else after them as text.
bool value_less(const std::string& a, const std::string& b)
{
    double x = 0, y = 0;
    const bool nx = std::from_chars(a.data(), a.data() + a.size(), x).ec == std::errc();
    const bool ny = std::from_chars(b.data(), b.data() + b.size(), y).ec == std::errc();
    if (nx && ny && x != y)
        return x < y;
    if (nx != ny)
        return nx;
    return a < b;
}

}  // namespace

std::vector<SweepPoint> run_sweep(const RunConfig& base, const std::string& key,
                                  const std::vector<std::string>& values, const std::string& dir)
{
    std::vector<std::string> sorted = values;
    std::stable_sort(sorted.begin(), sorted.end(), value_less);

    std::vector<SweepPoint> points(sorted.size());
    const auto run_point = [&base, &key](const std::string& value) {
        ScenarioResult r;
        RunConfig config = base;
        try {
            assign_key(config, key, value);
        } catch (const ConfigError& e) {
            r.exit_code = exit_config_error;
            r.summary["error"] = {{"kind", config_kind(e.kind)}, {"message", e.what()}};
            r.summary["exit_code"] = r.exit_code;
            return r;
        }
        return run_scenario(config);
    };

    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < sorted.size(); start += workers) {
        std::vector<std::future<ScenarioResult>> batch;
        const std::size_t stop = std::min(sorted.size(), start + workers);
        for (std::size_t i = start; i < stop; ++i)
            batch.push_back(std::async(std::launch::async, run_point, sorted[i]));
        for (std::size_t i = start; i < stop; ++i) {
            points[i].value = sorted[i];
            points[i].result = batch[i - start].get();
        }
    }

    if (!dir.empty()) {
        std::filesystem::create_directories(dir);
        for (std::size_t i = 0; i < points.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "point_%03zu", i);
            write_outputs(points[i].result, (std::filesystem::path(dir) / name).string());
        }
        write_file_atomic((std::filesystem::path(dir) / "sweep.csv").string(),
                          sweep_table_csv(key, points));
    }
    return points;
}

std::string sweep_table_csv(const std::string& key, const std::vector<SweepPoint>& points)
{
    std::string out = key + ",status,exit_code,classification,termination,E0,T_measured,T_low,"
                            "decay_rate\n";
    const auto field = [](const json& j, const char* name) -> std::string {
        if (!j.contains(name) || j[name].is_null())
            return "nan";
        if (j[name].is_number())
            return format_number(j[name].get<double>());
        return j[name].get<std::string>();
    };
    for (const SweepPoint& p : points) {
        const json& s = p.result.summary;
        const bool ok = p.result.exit_code == exit_success;
        out += p.value + "," + (ok ? "ok" : "failed") + "," + std::to_string(p.result.exit_code) +
               ",";
        out += field(s, "classification") + "," + field(s, "termination") + ",";
        out += (s.contains("energy") ? field(s["energy"], "E0") : std::string("nan")) + ",";
        out += field(s, "T_measured") + "," + field(s, "T_low") + ",";
        out += (s.contains("decay_fit") && !s["decay_fit"].is_null() ? field(s["decay_fit"], "rate")
                                                                     : std::string("nan"));
        out += "\n";
    }
    return out;
}

}  // namespace vexdelay
