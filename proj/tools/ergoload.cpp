// ergoload: run arm-load redistribution scenarios and recompute their metrics.

#include "ergoload/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace {

using namespace ergoload;

std::filesystem::path output_root(const std::string& flag)
{
    if (const char* env = std::getenv("ERGOLOAD_OUT"); env && *env)
        return env;
    return flag;
}

char experiment_letter(const std::string& s)
{
    if (s.size() != 1 || s[0] < 'A' || s[0] > 'E')
        throw CLI::ValidationError("--experiment", "expected one of A..E, got '" + s + "'");
    return s[0];
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ergonomic load redistribution: arm model, optimizer, exoskeleton and cobot simulation"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Simulate one experiment and write timeseries.csv, report.json, run.json");
    std::string experiment, config_path, out_dir = "out";
    std::optional<double> payload;
    std::optional<std::uint64_t> seed;
    bool with_exo = false, without_exo = false;
    auto* exp_opt = run->add_option("--experiment", experiment, "Preset A..E");
    auto* cfg_opt = run->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    exp_opt->excludes(cfg_opt);
    auto* on = run->add_flag("--with-exo", with_exo, "Elbow exoskeleton active");
    run->add_flag("--without-exo", without_exo, "Elbow exoskeleton inactive")->excludes(on);
    run->add_option("--payload-kg", payload, "Payload mass [kg]");
    run->add_option("--seed", seed, "RNG seed");
    run->add_option("--out-dir", out_dir, "Output root; ERGOLOAD_OUT overrides");

    // metrics
    auto* metrics = app.add_subcommand("metrics", "Recompute the report from a saved timeseries.csv");
    std::string csv_path, metrics_out;
    metrics->add_option("csv", csv_path, "timeseries.csv")->required()->check(CLI::ExistingFile);
    metrics->add_option("-o,--output", metrics_out, "Write JSON here instead of stdout");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run several experiments and print a summary table");
    std::vector<std::string> sweep_ids{"B", "C", "D", "E"};
    std::string sweep_out;
    std::uint64_t sweep_seed = 1;
    sweep->add_option("--experiments", sweep_ids, "Comma-separated presets")->delimiter(',');
    sweep->add_option("--seed", sweep_seed, "RNG seed");
    sweep->add_option("--out-dir", sweep_out, "Also write each run under this root");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            if (experiment.empty() && config_path.empty())
                throw CLI::RequiredError("--experiment or --config");
            ScenarioConfig cfg = config_path.empty() ? preset(experiment_letter(experiment)) : load_config(config_path);
            if (with_exo)
                cfg.exo.active = true;
            if (without_exo)
                cfg.exo.active = false;
            if (payload)
                cfg.payload_kg = *payload;
            if (seed)
                cfg.rng_seed = *seed;

            const ScenarioResult res = run_scenario(cfg);
            const auto dir = output_root(out_dir) / std::string(1, cfg.experiment_id);
            write_run(dir, cfg, res);
            std::cout << "wrote " << dir.string() << '\n';
            if (!res.optimizer.error.empty())
                std::cerr << "optimizer: " << res.optimizer.error << '\n';
        } else if (*metrics) {
            const TimeSeriesLog log = read_timeseries_csv(std::filesystem::path(csv_path));
            const std::string text = report_to_json(compute_metrics(log)).dump(2) + "\n";
            if (metrics_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(metrics_out);
                if (!(out << text))
                    throw std::runtime_error("cannot write " + metrics_out);
            }
        } else if (*sweep) {
            std::vector<ScenarioConfig> cfgs;
            for (const auto& id : sweep_ids) {
                cfgs.push_back(preset(experiment_letter(id)));
                cfgs.back().rng_seed = sweep_seed;
            }
            std::vector<std::future<ScenarioResult>> jobs;
            for (const auto& cfg : cfgs)
                jobs.push_back(std::async(std::launch::async, [&cfg] { return run_scenario(cfg); }));

            std::vector<SweepRow> rows;
            for (std::size_t i = 0; i < jobs.size(); ++i) {
                const ScenarioResult res = jobs[i].get();
                if (!sweep_out.empty())
                    write_run(output_root(sweep_out) / std::string(1, cfgs[i].experiment_id), cfgs[i], res);
                rows.push_back({cfgs[i].experiment_id, cfgs[i].exo.active, res.report});
            }
            std::cout << format_sweep_table(rows);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
