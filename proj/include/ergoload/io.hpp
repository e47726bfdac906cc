#pragma once

#include "ergoload/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace ergoload {

/// Bad config document. The message starts with the dotted field path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// JSON config with sections geometry, exo, cobot, optimizer, scenario,
/// follower. scenario.experiment_id and scenario.payload_kg are required;
/// every other field defaults from the experiment preset. Unknown keys are
/// rejected.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Full config in the same schema (round-trips through parse_config).
nlohmann::json config_to_json(const ScenarioConfig& cfg);

extern const std::vector<std::string> kCsvColumns;

void write_timeseries_csv(std::ostream& os, const TimeSeriesLog& log);
void write_timeseries_csv(const std::filesystem::path& path, const TimeSeriesLog& log);
TimeSeriesLog read_timeseries_csv(std::istream& is);
TimeSeriesLog read_timeseries_csv(const std::filesystem::path& path);

nlohmann::json report_to_json(const MetricsReport& rep);
nlohmann::json optimizer_to_json(const OptimizerSummary& opt);

/// Writes <dir>/timeseries.csv, report.json and run.json.
void write_run(const std::filesystem::path& dir, const ScenarioConfig& cfg, const ScenarioResult& res);

struct SweepRow {
    char experiment_id;
    bool exo_active;
    MetricsReport report;
};

/// Plain-text table, one row per experiment.
std::string format_sweep_table(const std::vector<SweepRow>& rows);

} // namespace ergoload
