#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "vexdelay/errors.hpp"
#include "vexdelay/presets.hpp"
#include "vexdelay/scenario.hpp"

using namespace vexdelay;

namespace
{

void print_error(const std::string& kind, const std::string& message)
{
    nlohmann::ordered_json e = {{"error", {{"kind", kind}, {"message", message}}}};
    std::cerr << e.dump() << "\n";
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, sep))
        parts.push_back(item);
    return parts;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulator for the delayed wave equation with variable-exponent damping"};
    std::string config_path, preset, out_dir = "out", sweep;
    bool override_conditions = false, list_presets = false;
    std::int64_t seed = -1;
    auto* config_opt = app.add_option("--config", config_path, "Run configuration file");
    auto* preset_opt = app.add_option("--preset", preset, "Shipped preset name");
    config_opt->excludes(preset_opt);
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--sweep", sweep, "section.key=v1,v2,... parameter sweep");
    app.add_flag("--override-conditions", override_conditions,
                 "Run even when the structural conditions fail");
    app.add_option("--seed", seed, "Seed of the randomized embedding family");
    app.add_flag("--list-presets", list_presets, "Print the shipped presets and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_config_error;
    }

    if (list_presets) {
        for (const std::string& name : preset_names())
            std::cout << name << "\n";
        return 0;
    }

    RunConfig config;
    try {
        if (!preset.empty()) {
            config = load_preset(preset);
        } else if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in)
                throw ConfigError(ConfigError::Kind::parse, "cannot read " + config_path);
            std::stringstream text;
            text << in.rdbuf();
            config = parse_config(text.str());
        } else {
            throw ConfigError(ConfigError::Kind::missing_key, "one of --config or --preset is required");
        }
        if (override_conditions)
            config.override_conditions = true;
        if (seed >= 0)
            config.seed = static_cast<std::uint64_t>(seed);
    } catch (const ConfigError& e) {
        print_error("config", e.what());
        return exit_config_error;
    }

    try {
        if (!sweep.empty()) {
            const auto eq = sweep.find('=');
            if (eq == std::string::npos)
                throw ConfigError(ConfigError::Kind::parse, "--sweep expects section.key=v1,v2,...");
            const std::string key = sweep.substr(0, eq);
            const std::vector<std::string> values = split(sweep.substr(eq + 1), ',');
            if (values.empty())
                throw ConfigError(ConfigError::Kind::parse, "--sweep needs at least one value");
            RunConfig probe = config;
            assign_key(probe, key, values.front());
            const auto points = run_sweep(config, key, values, out_dir);
            std::cout << sweep_table_csv(key, points);
            return 0;
        }
    } catch (const ConfigError& e) {
        print_error("config", e.what());
        return exit_config_error;
    }

    const ScenarioResult result = run_scenario(config);
    try {
        write_outputs(result, out_dir);
    } catch (const std::exception& e) {
        print_error("io", e.what());
        return exit_numerical_failure;
    }
    if (result.summary.contains("error"))
        std::cerr << nlohmann::ordered_json{{"error", result.summary["error"]}}.dump() << "\n";
    else
        std::cout << result.summary["classification"].get<std::string>() << " ("
                  << result.summary["termination"].get<std::string>() << ") -> " << out_dir << "\n";
    return result.exit_code;
}
