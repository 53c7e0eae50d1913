#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "vexdelay/analysis.hpp"
#include "vexdelay/config.hpp"

namespace vexdelay
{

/// Process exit codes shared by the CLI and the sweep table.
enum ExitCode : int
{
    exit_success = 0,
    exit_config_error = 2,
    exit_numerical_failure = 3,
    exit_condition_failure = 4,
};

struct ScenarioResult
{
    int exit_code = exit_success;
    Trajectory trajectory;
    RegimeVerdict verdict;
    nlohmann::ordered_json summary;  // deterministic: no wall time
    std::string csv;                 // empty when the run never started
    double wall_seconds = 0;
};

/// Builds, checks, runs and analyses one configuration. Never throws for
/// configuration or numerical problems; those end up in exit_code and summary["error"].
ScenarioResult run_scenario(const RunConfig& config);

/// trajectory.csv, summary.json and timing.json in dir (created if needed).
void write_outputs(const ScenarioResult& result, const std::string& dir);

struct SweepPoint
{
    std::string value;
    ScenarioResult result;
};

/// Runs base with key set to each value, concurrently, writing each point to
/// dir/point_NNN (NNN: rank of the value), then dir/sweep.csv ordered by value.
std::vector<SweepPoint> run_sweep(const RunConfig& base, const std::string& key,
                                  const std::vector<std::string>& values, const std::string& dir);

std::string sweep_table_csv(const std::string& key, const std::vector<SweepPoint>& points);

}  // namespace vexdelay
