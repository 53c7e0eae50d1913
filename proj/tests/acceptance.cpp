// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "vexdelay/analysis.hpp"
#include "vexdelay/config.hpp"
#include "vexdelay/delay.hpp"
#include "vexdelay/presets.hpp"
#include "vexdelay/scenario.hpp"
#include "vexdelay/solver.hpp"
#include "vexdelay/spaces.hpp"

using namespace vexdelay;
namespace fs = std::filesystem;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args)
{
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, pattern, args...);
    return buffer;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// First run of every preset, reused by the determinism check.
std::map<std::string, std::pair<ScenarioResult, double>> first_runs;

const ScenarioResult& preset_run(const std::string& name)
{
    auto it = first_runs.find(name);
    if (it == first_runs.end()) {
        const auto start = std::chrono::steady_clock::now();
        ScenarioResult r = run_scenario(load_preset(name));
        it = first_runs.emplace(name, std::make_pair(std::move(r), seconds_since(start))).first;
    }
    return it->second.first;
}

double steps_between(const Sample& a, const Sample& b, double dt)
{
    return std::max(1.0, std::round((b.report.t - a.report.t) / dt));
}

Outcome dissipation()
{
    const ScenarioResult& r = preset_run("decay_exponential");
    if (r.exit_code != exit_success)
        return {false, "run failed"};
    const RunConfig config = load_preset("decay_exponential");
    const Setup setup = build_setup(config);
    const double dt = r.summary["dt"].get<double>();
    const double c0 = dissipation_constant(setup.model.kernel, XiField(setup.model.xi), setup.model.m).value;
    const auto& s = r.trajectory.samples;

    int holding = 0, monotone = 0;
    const int pairs = static_cast<int>(s.size()) - 1;
    for (int i = 0; i < pairs; ++i) {
        const DissipationVerdict d =
            dissipation_check(s[i].report, s[i + 1].report, c0, config.dissipation_slack * dt);
        holding += d.applicable && d.holds;
        const double slack = 10 * dt * dt * dt * steps_between(s[i], s[i + 1], dt);
        monotone += s[i + 1].report.E <= s[i].report.E + slack;
    }
    return {pairs > 0 && holding == pairs && monotone == pairs,
            fmt("C0 %.4g, dissipation %d/%d pairs, E nonincreasing %d/%d", c0, holding, pairs, monotone,
                pairs)};
}

double conservation_drift(double dt)
{
    RunConfig c = load_preset("conservation");
    if (dt > 0)
        c.dt = dt;
    const ScenarioResult r = run_scenario(c);
    if (r.exit_code != exit_success || r.trajectory.samples.empty())
        return std::nan("");
    const auto& s = r.trajectory.samples;
    return std::abs(s.back().report.E - s.front().report.E);
}

Outcome conservation()
{
    const ScenarioResult& r = preset_run("conservation");
    if (r.exit_code != exit_success)
        return {false, "run failed"};
    const double dt = r.summary["dt"].get<double>();
    const auto& s = r.trajectory.samples;
    const double E0 = s.front().report.E;
    const double drift = std::abs(s.back().report.E - E0);
    const double halved = conservation_drift(dt / 2);
    const double ratio = drift / halved;
    return {drift <= 1e-3 * E0 && ratio >= 3.5,
            fmt("E0 %.6g, drift %.3g (limit %.3g), halved-dt drift %.3g, ratio %.2f", E0, drift, 1e-3 * E0,
                halved, ratio)};
}

// Largest L2 distance between z and the stored velocity history, over all (rho, tau) nodes, at t = 2 tau2.
double transport_error(int n_rho, double dt_factor)
{
    RunConfig c = load_preset("decay_exponential");
    c.n_rho = n_rho;
    Setup setup = build_setup(c);
    Model& model = setup.model;
    model.dt = model.cfl_limit() * dt_factor;
    SimState state = init_state(model, setup.u0, setup.u1);

    const double t_target = 2 * model.kernel.tau2;
    const long steps = std::lround(t_target / model.dt);
    for (long i = 0; i < steps; ++i)
        if (!step(state, model))
            return std::nan("");

    const Index n_tau = model.kernel.size();
    const Vector& w = model.grid.weights();
    double worst = 0;
    for (int j = 0; j < model.n_rho; ++j) {
        const double rho = j * model.rho_spacing();
        for (Index k = 0; k < n_tau; ++k) {
            const GridFunction oracle = history_oracle(state, model, model.kernel.nodes(k), rho);
            const GridFunction diff = state.z.col(j * n_tau + k) - oracle;
            worst = std::max(worst, std::sqrt(w.dot(diff.cwiseAbs2())));
        }
    }
    return worst;
}

Outcome transport()
{
    const double coarse = transport_error(32, 1.0);
    const double fine = transport_error(63, 0.5);
    const double ratio = coarse / fine;
    return {ratio >= 1.7 && ratio <= 2.3,
            fmt("error %.4g -> %.4g under (dt, drho) halving, ratio %.3f", coarse, fine, ratio)};
}

Outcome blowup_regime()
{
    const ScenarioResult& r = preset_run("blowup");
    const auto& s = r.trajectory.samples;
    if (s.empty())
        return {false, "run failed"};
    const double E0 = r.summary["energy"]["E0"].get<double>();
    const bool blew = r.summary["classification"] == "blow-up" && r.trajectory.end_time < 50;
    const double p1 = build_setup(load_preset("blowup")).model.p.lower();

    int l_up = 0, chain = 0;
    const double H0 = s.front().report.H;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const EnergyReport& e = s[i].report;
        chain += 0 < H0 && H0 <= e.H && e.H <= e.source_modular / p1;
        if (i + 1 < s.size())
            l_up += s[i + 1].report.L >= e.L;
    }
    const int pairs = static_cast<int>(s.size()) - 1;
    const double fraction = pairs > 0 ? double(l_up) / pairs : 0;
    return {E0 < 0 && blew && fraction >= 0.99 && chain == static_cast<int>(s.size()),
            fmt("E0 %.4g, %s at t = %.4g, L nondecreasing %d/%d, H chain %d/%zu", E0,
                r.summary["classification"].get<std::string>().c_str(), r.trajectory.end_time, l_up, pairs,
                chain, s.size())};
}

Outcome lower_bound()
{
    const double closed = blowup_lower_bound(1, 0, 1, 3, 3);
    const double exact = std::log(1.5);
    const bool closed_ok = std::abs(closed - exact) <= 1e-6 * exact;

    int consistent = 0, total = 0;
    std::string worst;
    double worst_margin = INFINITY;
    const auto check = [&](const ScenarioResult& r, const std::string& label) {
        ++total;
        const auto& s = r.summary;
        if (s["classification"] != "blow-up" || !s["T_low"].is_number())
            return;
        const double measured = s["T_measured"].get<double>(), low = s["T_low"].get<double>();
        if (measured >= low)
            ++consistent;
        if (measured / low < worst_margin) {
            worst_margin = measured / low;
            worst = label;
        }
    };
    check(preset_run("blowup"), "preset");

    const fs::path dir = fs::temp_directory_path() / "vexdelay_acceptance_sweep";
    fs::remove_all(dir);
    const auto points =
        run_sweep(load_preset("blowup"), "initial.scale", {"0.8", "0.9", "1.1", "1.25", "1.5"}, dir.string());
    for (const SweepPoint& point : points)
        check(point.result, "scale " + point.value);
    fs::remove_all(dir);

    return {closed_ok && consistent == total && total == 6,
            fmt("closed form %.9f vs %.9f; T_measured >= T_low on %d/%d runs, tightest ratio %.4g (%s)", closed,
                exact, consistent, total, worst_margin, worst.c_str())};
}

Outcome gate()
{
    const RunConfig c = load_preset("decay_exponential");
    const ScenarioResult& r = preset_run("decay_exponential");
    const Setup setup = build_setup(c);
    EmbeddingFamily family;
    family.samples = c.embedding_samples;
    family.safety = c.embedding_safety;
    family.seed = c.seed;
    const double c_gate = certify_embedding(setup.model.grid, gate_target(setup.model.p), family).constant;
    const GateReport g = global_existence_gate(setup.model, setup.u0, setup.u1, c_gate);

    const double p1 = setup.model.p.lower();
    const double bound = 2 * p1 / (p1 - 2) * g.E0;
    int positive = 0, bounded = 0;
    for (const Sample& s : r.trajectory.samples) {
        positive += s.report.I > 0;
        bounded += 2 * s.report.elastic <= bound;
    }
    const int n = static_cast<int>(r.trajectory.samples.size());
    return {g.passed() && n > 0 && positive == n && bounded == n,
            fmt("beta %.4g < %.4g (c = %.4g), I > 0 at %d/%d, |grad u|^2 <= %.4g at %d/%d", g.beta, g.threshold,
                c_gate, positive, n, bound, bounded, n)};
}

Outcome decay_rates()
{
    const ScenarioResult& ex = preset_run("decay_exponential");
    DecayFitOptions window;
    window.fit_from = 20;
    window.fit_to = 40;
    double r2 = 0, rate = 0;
    bool fitted = false;
    try {
        const DecayFit fit = fit_decay(ex.trajectory, 2, window);
        r2 = fit.r_squared;
        rate = fit.rate;
        fitted = true;
    } catch (const std::exception&) {
    }

    const ScenarioResult& poly = preset_run("decay_polynomial");
    const auto& s = poly.trajectory.samples;
    double sup = 0;
    const double E0 = s.empty() ? 0 : s.front().report.E;
    for (const Sample& x : s)
        if (x.report.t >= 5 && x.report.t <= 80)
            sup = std::max(sup, x.report.E * (1 + x.report.t) * (1 + x.report.t));
    const bool span = !s.empty() && s.back().report.t >= 80 - 1e-9;
    return {fitted && r2 >= 0.99 && span && E0 > 0 && sup <= 10 * E0,
            fmt("m = 2: rate %.4g, R^2 %.6f; m2 = 3: sup E(1+t)^2 = %.4g vs 10 E0 = %.4g", rate, r2, sup,
                10 * E0)};
}

Outcome spaces_suite()
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0, 1);
    const Grid g = Grid::line(1, 100);
    const auto random_function = [&] {
        const double a = std::exp(std::log(1e-2) + unit(rng) * std::log(1e4));
        GridFunction u(g.size());
        const int modes = 1 + static_cast<int>(unit(rng) * 5);
        std::vector<double> c(modes);
        for (double& v : c)
            v = 2 * unit(rng) - 1;
        for (Index i = 0; i < g.size(); ++i) {
            const double x = g.coordinate(i, 0);
            double sum = 0;
            for (int k = 0; k < modes; ++k)
                sum += c[k] * std::sin((k + 1) * M_PI * x + k);
            u(i) = a * sum;
        }
        return u;
    };

    double worst_rel = 0;
    for (int n = 0; n < 100; ++n) {
        const GridFunction u = random_function();
        const double q = 1 + 5 * unit(rng);
        const double classical = std::pow(g.integrate(u.array().abs().pow(q).matrix()), 1 / q);
        const double lux = luxemburg_norm(g, u, ExponentField::constant(g, q));
        worst_rel = std::max(worst_rel, std::abs(lux - classical) / classical);
    }

    int unit_ball = 0, sandwich = 0;
    for (int n = 0; n < 200; ++n) {
        const GridFunction u = random_function();
        const double a = 1 + 5 * unit(rng), b = 1 + 5 * unit(rng), cut = unit(rng);
        const ExponentField p(g, g.sample([&](double x, double) { return x < cut ? a : b; }));
        const double norm = luxemburg_norm(g, u, p);
        const double rho = modular(g, u, p);
        const bool ball = (norm < 1) == (rho < 1) && (norm > 1) == (rho > 1) &&
                          std::abs(modular(g, (u / norm).eval(), p) - 1) < 1e-9;
        unit_ball += ball;
        sandwich += check_sandwich(g, u, p);
    }

    const ExponentField piecewise(g, g.sample([](double x, double) { return x < 0.5 ? 2.0 : 4.0; }));
    const double lambda = luxemburg_norm(g, GridFunction::Constant(g.size(), 2.0), piecewise);
    const bool closed = std::abs(lambda - 2) <= 2e-8;

    return {worst_rel <= 1e-10 && unit_ball == 200 && sandwich == 200 && closed,
            fmt("Luxemburg vs L^q worst rel %.2g; unit ball %d/200; sandwich %d/200; lambda* = %.12f", worst_rel,
                unit_ball, sandwich, lambda)};
}

Outcome weighted_delay()
{
    const ScenarioResult& r = preset_run("decay_exponential");
    const Setup setup = build_setup(load_preset("decay_exponential"));
    const WeightedDelayConstants k = weighted_delay_constants(setup.model.kernel, setup.model.xi, setup.model.m);
    const double dt = r.summary["dt"].get<double>();
    const auto& s = r.trajectory.samples;
    int holding = 0;
    const int pairs = static_cast<int>(s.size()) - 1;
    for (int i = 0; i < pairs; ++i) {
        const EnergyReport &a = s[i].report, &b = s[i + 1].report;
        const double slope = (b.F - a.F) / (b.t - a.t);
        const double rhs = 0.5 * (k.alpha1 * (a.damping_modular + b.damping_modular) -
                                  k.alpha2 * (a.delay_bulk + b.delay_bulk));
        holding += slope <= rhs + 50 * dt;
    }
    const double fraction = pairs > 0 ? double(holding) / pairs : 0;
    return {fraction >= 0.99, fmt("alpha1 %.4g, alpha2 %.4g, inequality holds at %d/%d pairs", k.alpha1, k.alpha2,
                                  holding, pairs)};
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism()
{
    const fs::path root = fs::temp_directory_path() / "vexdelay_acceptance_determinism";
    fs::remove_all(root);
    int identical = 0;
    std::string slow;
    const auto names = preset_names();
    for (const std::string& name : names) {
        preset_run(name);
        const auto& [first, first_seconds] = first_runs.at(name);
        const auto start = std::chrono::steady_clock::now();
        const ScenarioResult second = run_scenario(load_preset(name));
        const double second_seconds = seconds_since(start);
        write_outputs(first, (root / name / "a").string());
        write_outputs(second, (root / name / "b").string());
        bool same = true;
        for (const char* file : {"trajectory.csv", "summary.json"})
            same = same && slurp(root / name / "a" / file) == slurp(root / name / "b" / file);
        identical += same;
        if (second_seconds > 2 * first_seconds + 0.5)
            slow += " " + name;
    }
    fs::remove_all(root);
    return {identical == static_cast<int>(names.size()) && slow.empty(),
            fmt("%d/%zu presets byte-identical%s%s", identical, names.size(), slow.empty() ? "" : "; slow:",
                slow.c_str())};
}

struct Criterion
{
    const char* name;
    double budget;  // seconds
    std::function<Outcome()> check;
};

}  // namespace

int main()
{
    const Criterion criteria[] = {
        {"dissipation", 10, dissipation},
        {"conservation", 10, conservation},
        {"transport fidelity", 30, transport},
        {"blow-up regime", 20, blowup_regime},
        {"lower bound consistency", 60, lower_bound},
        {"global existence gate", 10, gate},
        {"decay rates", 60, decay_rates},
        {"exponent space suite", 5, spaces_suite},
        {"weighted delay inequality", 10, weighted_delay},
        {"determinism", 120, determinism},
    };

    int failures = 0;
    int index = 0;
    for (const Criterion& c : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed = seconds_since(start);
        const bool in_time = elapsed <= c.budget;
        const bool pass = outcome.pass && in_time;
        failures += !pass;
        std::printf("%s %2d %-26s %7.2f s  %s%s\n", pass ? "PASS" : "FAIL", index, c.name, elapsed,
                    outcome.detail.c_str(), in_time ? "" : " (over time budget)");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", index - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
