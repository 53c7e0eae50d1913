#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vexdelay/errors.hpp"
#include "vexdelay/expression.hpp"
#include "vexdelay/format.hpp"
#include "vexdelay/presets.hpp"
#include "vexdelay/scenario.hpp"

using namespace vexdelay;
namespace fs = std::filesystem;

namespace
{

const char* minimal = R"(
[grid]
nodes = 41

[exponents]
m = 2
p = 4

[delay]
mu1 = 1
tau1 = 1
tau2 = 2

[initial]
u0 = 0

[run]
t_end = 0.5
)";

std::string read(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("vexdelay_test_" + name);
    fs::remove_all(dir);
    return dir;
}

ConfigError parse_error(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a config error");
    return ConfigError(ConfigError::Kind::parse, "");
}

}  // namespace

TEST_CASE("expressions")
{
    const Bindings b{0.25, 0.5, -1.0, 1.5};
    CHECK(Expression::parse("1 + 2 * 3")({}) == 7);
    CHECK(Expression::parse("2 ^ 3 ^ 2")({}) == 512);
    CHECK(Expression::parse("-2 ^ 2")({}) == -4);
    CHECK(Expression::parse("sin(pi * x)")(b) == doctest::Approx(std::sin(std::numbers::pi / 4)));
    CHECK(Expression::parse("exp(s) * tau + y")(b) == doctest::Approx(std::exp(-1.0) * 1.5 + 0.5));
    CHECK(Expression::parse("\xCF\x84 * 2")(b) == 3);
    CHECK(Expression::parse("abs(s) + cos(0) + e")(b) == doctest::Approx(2 + std::numbers::e));
    CHECK(Expression::parse("max(x, y) - min(x, y) + step(s)")(b) == doctest::Approx(0.25));
    CHECK(Expression::parse("1e-3 * 2")({}) == doctest::Approx(2e-3));
    CHECK(Expression::parse("sin(x)").uses('x'));
    CHECK_FALSE(Expression::parse("sin(x)").uses('y'));

    for (const char* bad : {"1 +", "sin(x", "foo(1)", "2 * * 3", "min(1)", "(1))", "z"}) {
        try {
            Expression::parse(bad);
            FAIL("accepted " << bad);
        } catch (const ConfigError& e) {
            CHECK(e.kind == ConfigError::Kind::expression);
            CHECK(std::string(e.what()).find(bad) != std::string::npos);
            CHECK(e.column >= 1);
        }
    }
}

TEST_CASE("minimal document gets the documented defaults")
{
    const RunConfig c = parse_config(minimal);
    CHECK(c.n_rho == 32);
    CHECK(c.n_tau == 16);
    CHECK(c.threshold == 1e6);
    CHECK_FALSE(c.dt.has_value());
    CHECK(c.decay_factor == 1e-2);
    CHECK(c.log_holder_A == 10);
    CHECK(c.log_holder_delta == 0.5);
    CHECK(c.xi == "auto");
}

TEST_CASE("config errors")
{
    SUBCASE("range error names the key and the bound")
    {
        std::string text = minimal;
        text.replace(text.find("m = 2"), 5, "m = 1.5");
        const ConfigError e = parse_error(text);
        CHECK(e.kind == ConfigError::Kind::range);
        CHECK(std::string(e.what()).find("exponents.m") != std::string::npos);
        CHECK(std::string(e.what()).find("m >= 2") != std::string::npos);
    }
    SUBCASE("unknown key")
    {
        const ConfigError e = parse_error(std::string(minimal) + "bogus = 1\n");
        CHECK(e.kind == ConfigError::Kind::unknown_key);
        CHECK(e.line == 19);
    }
    SUBCASE("unknown section")
    {
        CHECK(parse_error(std::string(minimal) + "[extra]\n").kind == ConfigError::Kind::unknown_key);
    }
    SUBCASE("parse error with line and column")
    {
        const ConfigError e = parse_error("[grid]\nnodes = 41\n  extent 2\n");
        CHECK(e.kind == ConfigError::Kind::parse);
        CHECK(e.line == 3);
        CHECK(e.column == 3);
    }
    SUBCASE("bad number")
    {
        std::string text = minimal;
        text.replace(text.find("nodes = 41"), 10, "nodes = 4x1");
        const ConfigError e = parse_error(text);
        CHECK(e.kind == ConfigError::Kind::parse);
        CHECK(e.line == 3);
    }
    SUBCASE("expression error carries the expression text and column")
    {
        std::string text = minimal;
        text.replace(text.find("u0 = 0"), 6, "u0 = sin(pi * q)");
        const ConfigError e = parse_error(text);
        CHECK(e.kind == ConfigError::Kind::expression);
        CHECK(std::string(e.what()).find("sin(pi * q)") != std::string::npos);
        CHECK(e.line == 15);
        CHECK(e.column == 15);
    }
    SUBCASE("missing key")
    {
        std::string text = minimal;
        text.replace(text.find("t_end = 0.5"), 11, "");
        CHECK(parse_error(text).kind == ConfigError::Kind::missing_key);
    }
    SUBCASE("duplicate key")
    {
        CHECK(parse_error(std::string(minimal) + "t_end = 2\n").kind == ConfigError::Kind::parse);
    }
    SUBCASE("cross-key ranges")
    {
        std::string text = minimal;
        text.replace(text.find("tau2 = 2"), 8, "tau2 = 0.5");
        CHECK(parse_error(text).kind == ConfigError::Kind::range);
    }
}

TEST_CASE("presets parse and round-trip")
{
    CHECK(preset_names().size() == 5);
    for (const std::string& name : preset_names()) {
        CAPTURE(name);
        const RunConfig c = load_preset(name);
        const RunConfig again = parse_config(serialize_config(c));
        CHECK(again == c);
        CHECK(serialize_config(again) == serialize_config(c));
        CHECK(config_hash(again) == config_hash(c));
    }
    CHECK_THROWS_AS(load_preset("nope"), ConfigError);

    RunConfig c = parse_config(minimal);
    c.mu2_table = {{0.5, 0.1}, {2.5, 0.3}};
    c.dt = 0.001;
    c.alpha = 0.05;
    CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("shortest round-trip numbers")
{
    for (double v : {0.1, 1.0 / 3, 1e-300, 6.02214076e23, -0.0, 123456789.0}) {
        const std::string s = format_number(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("scenario outputs")
{
    SUBCASE("golden CSV header")
    {
        CHECK(std::string(trajectory_header) ==
              "t,E,H,I,J,F,L,phi,kinetic,elastic,delay_energy,source_potential,damping_modular,"
              "delay_modular,sup_u");
    }
    SUBCASE("zero data")
    {
        const ScenarioResult r = run_scenario(parse_config(minimal));
        CHECK(r.exit_code == exit_success);
        std::istringstream in(r.csv);
        std::string line;
        std::getline(in, line);
        CHECK(line == trajectory_header);
        int rows = 0;
        while (std::getline(in, line)) {
            ++rows;
            std::stringstream cells(line);
            std::string cell;
            int col = 0;
            while (std::getline(cells, cell, ',')) {
                if (col > 0 && col != 6)
                    CHECK(cell == "0");
                ++col;
            }
            CHECK(col == 15);
        }
        CHECK(rows > 1);
        CHECK(r.summary["classification"] == "global-decay");
    }
    SUBCASE("condition failure without override")
    {
        const ScenarioResult r = run_scenario(load_preset("instability_explore"));
        CHECK(r.exit_code == exit_condition_failure);
        CHECK(r.summary["error"]["kind"] == "condition-failure");
        CHECK(r.csv.empty());

        RunConfig c = load_preset("instability_explore");
        c.override_conditions = true;
        c.t_end = 2;
        const ScenarioResult forced = run_scenario(c);
        CHECK(forced.exit_code == exit_success);
        CHECK_FALSE(forced.csv.empty());
    }
    SUBCASE("determinism and single-point sweep")
    {
        RunConfig c = load_preset("blowup");
        const ScenarioResult a = run_scenario(c);
        const ScenarioResult b = run_scenario(c);
        CHECK(a.csv == b.csv);
        CHECK(a.summary.dump() == b.summary.dump());

        const fs::path dir = scratch("single_sweep");
        const auto points = run_sweep(c, "initial.scale", {"1"}, dir.string());
        REQUIRE(points.size() == 1);
        CHECK(points[0].result.csv == a.csv);
        CHECK(points[0].result.summary.dump() == a.summary.dump());
        CHECK(read(dir / "point_000" / "trajectory.csv") == a.csv);
        fs::remove_all(dir);
    }
    SUBCASE("sweep ordering and failed points")
    {
        RunConfig c = parse_config(minimal);
        c.u0 = "0.1 * sin(pi * x)";
        const fs::path dir = scratch("sweep");
        const auto points = run_sweep(c, "delay.mu1", {"2", "-1", "0.5"}, dir.string());
        REQUIRE(points.size() == 3);
        CHECK(points[0].value == "-1");
        CHECK(points[0].result.exit_code == exit_config_error);
        CHECK(points[1].value == "0.5");
        CHECK(points[2].result.exit_code == exit_success);
        const std::string table = read(dir / "sweep.csv");
        CHECK(table.find("-1,failed,2") != std::string::npos);
        CHECK(table.find("0.5,ok,0") < table.find("2,ok,0"));
        fs::remove_all(dir);
    }
}

TEST_CASE("command line exit codes")
{
    const char* cli = std::getenv("VEXDELAY_CLI");
    if (!cli) {
        MESSAGE("VEXDELAY_CLI not set; skipping process-level checks");
        return;
    }
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    const auto run = [&](const std::string& args) {
        const std::string cmd = std::string(cli) + " " + args + " > " + (dir / "log.txt").string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };
    const std::string out = (dir / "out").string();

    std::ofstream(dir / "bad.cfg") << "[grid]\nnodes = 41\nwhat = 1\n";
    CHECK(run("--config " + (dir / "bad.cfg").string() + " --out " + out) == 2);
    CHECK(run("--preset instability_explore --out " + out) == 4);
    CHECK(fs::exists(fs::path(out) / "summary.json"));

    std::ofstream(dir / "small.cfg") << minimal;
    CHECK(run("--config " + (dir / "small.cfg").string() + " --out " + out) == 0);
    CHECK(read(fs::path(out) / "trajectory.csv").rfind(std::string(trajectory_header), 0) == 0);

    CHECK(run("--config " + (dir / "small.cfg").string() + " --sweep initial.scale=0,1 --out " +
              (dir / "sw").string()) == 0);
    CHECK(fs::exists(dir / "sw" / "sweep.csv"));
    CHECK(run("--preset nope") == 2);
    fs::remove_all(dir);
}
