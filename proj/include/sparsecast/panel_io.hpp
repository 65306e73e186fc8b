#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sparsecast/forecast_record.hpp"
#include "sparsecast/run_config.hpp"
#include "sparsecast/vintage.hpp"

namespace sparsecast {

struct SeriesMetadata {
    std::string id;
    int release_lag_months = 0;
    bool sa_flag = true;
    std::optional<std::string> transform_hint;
    std::string source_tag;
};

struct IngestReport {
    std::vector<std::string> warnings;
};

/// Read a panel CSV (first column "YYYY-MM" for monthly data or "YYYY-Qn" for
/// quarterly targets, one series per remaining column) plus a metadata CSV
/// keyed by series id. Trailing cells may be empty (the ragged edge); interior
/// gaps are an error.
Dataset ingest_panel(const std::string& data_path, const std::string& metadata_path,
                     IngestReport* report = nullptr);

/// Write a dataset back out in the same format, full precision. Round-trips
/// bit-exactly through ingest_panel.
void write_panel(const Dataset& dataset, const std::string& data_path,
                 const std::string& metadata_path);

std::vector<SeriesMetadata> read_metadata(const std::string& path);

/// Parse the versioned JSON run configuration; unknown keys are errors.
struct LoadedConfig {
    RunConfig run;
    std::string panel_path;
    std::string metadata_path;
    std::string targets_path;
    std::string targets_metadata_path;
    bool prepare_panel = true;
    std::string fetch_api_key_env = "FRED_API_KEY";

    /// Ingest the monthly panel and the quarterly targets named in `data`.
    Dataset load_dataset(IngestReport* report = nullptr) const;
};
LoadedConfig load_config(const std::string& path);

/// Record store: one CSV of forecast records with a fixed header.
void write_records(const std::vector<ForecastRecord>& records, const std::string& path);
std::vector<ForecastRecord> read_records(const std::string& path);

}  // namespace sparsecast
