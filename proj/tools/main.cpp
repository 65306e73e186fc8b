#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "sparsecast/errors.hpp"
#include "sparsecast/exercise.hpp"
#include "sparsecast/fetch.hpp"
#include "sparsecast/panel_io.hpp"
#include "sparsecast/prep.hpp"
#include "sparsecast/report_emit.hpp"

namespace {

using namespace sparsecast;

std::vector<ReportFormat> parse_formats(const std::string& spec) {
    std::vector<ReportFormat> out;
    if (spec == "csv") out = {ReportFormat::Csv};
    else if (spec == "markdown") out = {ReportFormat::Markdown};
    else if (spec == "csv,markdown" || spec == "markdown,csv" || spec == "both")
        out = {ReportFormat::Csv, ReportFormat::Markdown};
    else throw ValidationError("unknown format '" + spec + "'");
    return out;
}

int cmd_prep(const std::string& panel, const std::string& metadata, const std::string& out_dir,
             std::uint64_t seed, int pp_reps) {
    Dataset raw = ingest_panel(panel, metadata);

    StationarizeOptions options;
    options.seed = seed;
    options.pp_bootstrap_reps = pp_reps;
    PreparedDataset prepared = prepare_dataset(raw, options);

    std::filesystem::create_directories(out_dir);
    write_panel(prepared.dataset, out_dir + "/panel.csv", out_dir + "/metadata.csv");
    if (!prepared.dataset.targets.empty()) {
        Dataset targets_only;
        targets_only.targets = prepared.dataset.targets;
        write_panel(targets_only, out_dir + "/targets.csv", out_dir + "/targets_metadata.csv");
    }
    write_prep_log(prepared.log, out_dir + "/transform_log.csv");

    int dropped = 0;
    for (const auto& entry : prepared.log)
        if (!entry.kept) ++dropped;
    std::cout << "prep: kept " << prepared.dataset.monthly.size() << " series, dropped " << dropped
              << "; wrote " << out_dir << "/panel.csv and transform_log.csv\n";
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::uint64_t seed_override,
            int jobs_override, const std::string& format) {
    LoadedConfig loaded = load_config(config_path);
    if (seed_override != 0) loaded.run.seed = seed_override;
    if (jobs_override > 0) loaded.run.parallelism = jobs_override;

    Dataset dataset = loaded.load_dataset();
    if (loaded.prepare_panel) {
        StationarizeOptions options;
        options.seed = loaded.run.seed;
        options.pp_bootstrap_reps = loaded.run.pp_bootstrap_reps;
        dataset = prepare_dataset(dataset, options).dataset;
    }

    const ExerciseOutcome outcome = run_exercise(dataset, loaded.run);
    if (outcome.look_ahead_violations > 0) {
        std::cerr << "run: " << outcome.look_ahead_violations << " look-ahead violations\n";
        return 2;
    }

    std::filesystem::create_directories(out_dir);
    write_records(outcome.records, out_dir + "/records.csv");

    const EvaluationReport report =
        build_report(outcome.records, loaded.run, dataset_digest(dataset));
    const auto files = emit_report(report, out_dir, parse_formats(format));

    std::cout << "run: " << outcome.records.size() << " records; wrote " << out_dir
              << "/records.csv and " << files.size() << " report tables\n";
    return 0;
}

int cmd_report(const std::string& config_path, const std::string& records_path,
               const std::string& out_dir, const std::string& format) {
    LoadedConfig loaded = load_config(config_path);
    const auto records = read_records(records_path);

    std::uint64_t data_digest_value = 0;
    if (!loaded.panel_path.empty() && std::filesystem::exists(loaded.panel_path))
        data_digest_value = dataset_digest(loaded.load_dataset());

    const EvaluationReport report = build_report(records, loaded.run, data_digest_value);
    const auto files = emit_report(report, out_dir, parse_formats(format));
    std::cout << "report: wrote " << files.size() << " tables to " << out_dir << "\n";
    return 0;
}

int cmd_fetch(const std::vector<std::string>& series, const std::string& api_key_env,
              const std::string& out_dir) {
    const char* key = std::getenv(api_key_env.c_str());
    if (!key || !*key) throw ValidationError("fetch: environment variable " + api_key_env + " not set");
    const FetchResult result = fetch_remote(series, key, out_dir, http_transport());
    std::cout << "fetch: wrote " << result.files_written.size() << " files for "
              << result.series_fetched.size() << " series\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse-regression nowcasting toolkit"};
    app.require_subcommand(1);

    std::string panel, metadata, out_dir = "out", config_path, records_path, format = "csv";
    std::uint64_t seed = 0;
    int jobs = 0, pp_reps = 999;
    std::vector<std::string> series;
    std::string api_key_env = "FRED_API_KEY";

    auto* prep = app.add_subcommand("prep", "screen and stationarize a raw panel");
    prep->add_option("--panel", panel)->required();
    prep->add_option("--metadata", metadata)->required();
    prep->add_option("--out", out_dir);
    prep->add_option("--seed", seed);
    prep->add_option("--pp-reps", pp_reps);

    auto* run = app.add_subcommand("run", "execute the pseudo-real-time exercise");
    run->add_option("--config", config_path)->required();
    run->add_option("--out", out_dir);
    run->add_option("--seed", seed);
    run->add_option("--jobs", jobs);
    run->add_option("--format", format);

    auto* report = app.add_subcommand("report", "re-emit tables from a saved record store");
    report->add_option("--config", config_path)->required();
    report->add_option("--records", records_path)->required();
    report->add_option("--out", out_dir);
    report->add_option("--format", format);

    auto* fetch = app.add_subcommand("fetch", "pull series from the remote data source");
    fetch->add_option("--series", series);
    fetch->add_option("--api-key-env", api_key_env);
    fetch->add_option("--out", out_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (prep->parsed()) return cmd_prep(panel, metadata, out_dir, seed ? seed : 1, pp_reps);
        if (run->parsed()) return cmd_run(config_path, out_dir, seed, jobs, format);
        if (report->parsed()) return cmd_report(config_path, records_path, out_dir, format);
        if (fetch->parsed()) return cmd_fetch(series, api_key_env, out_dir);
    } catch (const sparsecast::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
