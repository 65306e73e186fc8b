#pragma once

#include <vector>

#include "sparsecast/forecast_record.hpp"
#include "sparsecast/run_config.hpp"

namespace sparsecast {

struct ExerciseOutcome {
    std::vector<ForecastRecord> records;
    int look_ahead_violations = 0;
};

/// The pseudo-real-time driver. For every evaluation quarter it rebuilds the
/// vintage at the quarter's third month, forecast-fills the ragged edge,
/// refits every configured model (re-running validation and variable
/// selection), and emits the four horizon records per model. The ARMA
/// benchmark reselects its orders by AIC each quarter and carries no backcast.
/// A failed (quarter, model) cell yields flagged missing records rather than
/// aborting the run. Realized values are attached from the full dataset once
/// the loop completes.
ExerciseOutcome run_exercise(const Dataset& dataset, const RunConfig& config);

}  // namespace sparsecast
