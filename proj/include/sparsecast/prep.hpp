#pragma once

#include <string>
#include <vector>

#include "sparsecast/pipeline.hpp"
#include "sparsecast/vintage.hpp"

namespace sparsecast {

struct PrepLogEntry {
    std::string id;
    bool kept = true;
    std::string drop_reason;
    double spike_ratio = 0.0;
    double box_cox = 1.0;
    bool log_applied = false;
    int differences = 0;
    bool still_non_stationary = false;
};

struct PreparedDataset {
    Dataset dataset;
    std::vector<PrepLogEntry> log;
};

/// Whole-dataset screening: spike filter, then the stationarization loop on
/// every monthly series (series still non-stationary after two differences are
/// dropped and logged). Targets pass through the same stationarization.
PreparedDataset prepare_dataset(const Dataset& raw, const StationarizeOptions& options = {});

void write_prep_log(const std::vector<PrepLogEntry>& log, const std::string& path);

}  // namespace sparsecast
