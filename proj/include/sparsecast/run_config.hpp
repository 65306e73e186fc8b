#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsecast/calendar.hpp"
#include "sparsecast/lasso.hpp"
#include "sparsecast/vintage.hpp"

namespace sparsecast {

enum class WindowMode { Expanding, Rolling };

struct ModelSpec {
    std::string id;
    Variant variant = Variant::Lasso;
    bool is_arma_benchmark = false;
    std::optional<int> fixed_k;   // fixed-cardinality selection instead of CV
    double gamma = 1.0;           // adaptive weight exponent
    std::vector<double> phi_grid; // relaxed second stage; empty = default
    std::optional<double> fixed_lambda;  // skip CV (sqrt-LASSO pivotal default uses this path)
};

struct PeriodSplit {
    std::string label;
    Quarter first;
    Quarter last;
};

struct RunConfig {
    std::string target_id;
    WindowMode window_mode = WindowMode::Expanding;
    int window_years = 12;
    Quarter train_start{1982, 1};
    Quarter eval_start{2005, 1};
    Quarter eval_end{2014, 4};
    std::vector<ModelSpec> models;
    std::uint64_t seed = 0;
    int parallelism = 1;

    int max_lag_quarters = 4;
    int min_overlap_quarters = 24;
    int cv_holdout_quarters = 16;
    int cv_lambda_grid = 30;
    FillMethod fill_method = FillMethod::Arma;
    int fill_max_p = 4;
    int fill_max_q = 2;
    int benchmark_max_p = 4;
    int benchmark_max_q = 2;
    int pp_bootstrap_reps = 999;
    std::vector<PeriodSplit> splits;  // empty = the three default sub-periods

    void validate() const;
    std::vector<PeriodSplit> effective_splits() const;
};

/// Stable digest of the configuration (FNV-1a over a canonical rendering);
/// report headers embed it together with the dataset digest.
std::uint64_t config_digest(const RunConfig& config);

std::uint64_t dataset_digest(const Dataset& dataset);

}  // namespace sparsecast
