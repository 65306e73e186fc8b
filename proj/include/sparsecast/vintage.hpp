#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sparsecast/arma.hpp"
#include "sparsecast/design_matrix.hpp"
#include "sparsecast/time_series.hpp"

namespace sparsecast {

struct Dataset {
    std::vector<TimeSeries> monthly;
    std::vector<TimeSeries> targets;  // quarterly

    const TimeSeries& target(const std::string& id) const;
};

/// The dataset exactly as it would have been observable at `as_of`: every
/// monthly series truncated by its release lag, and the target history ending
/// two quarters back (the previous quarter is the backcast, not yet published).
struct Vintage {
    Month as_of;
    int month_of_quarter = 3;
    std::vector<TimeSeries> series;
    TimeSeries target_history;
};

enum class FillMethod { Arma, HoltWinters };

Vintage build_vintage(const Dataset& dataset, const std::string& target_id, Month as_of);

/// Forecast-fill each series' trailing gap through the last month of the +2Q
/// target quarter; filled values are flagged synthetic. A gap longer than 9
/// months is an error.
Vintage fill_ragged_edges(const Vintage& vintage, FillMethod method,
                          const ArmaFitOptions& arma_options = {});

/// One origin's modelling frame: the standardized training design (rows are
/// quarters with a published target) plus raw regressor rows for the four
/// target quarters (backcast, nowcast, +1Q, +2Q). Future rows draw on the
/// synthetic fills.
struct QuarterlyDesign {
    DesignMatrix design;
    std::vector<Quarter> row_quarters;
    std::array<Quarter, 4> prediction_quarters;
    Eigen::MatrixXd prediction_raw;  // 4 x p
    // per-column count of synthetic monthly observations feeding each
    // prediction row, for the look-ahead audit
    Eigen::MatrixXd prediction_synthetic_months;  // 4 x p
};

struct BuildDesignOptions {
    int max_lag_quarters = 4;
    int min_overlap_quarters = 24;
    std::optional<Quarter> window_start;  // rolling-window truncation of training rows
};

QuarterlyDesign build_design(const Vintage& filled, const std::string& target_id,
                             const BuildDesignOptions& options = {});

/// Metadata scan: every observed value must be dated within the vintage's
/// information set, synthetic fills must begin strictly after the last
/// observable month, and no training row may touch a synthetic quarter.
/// Returns the number of violations (0 = clean).
int audit_no_look_ahead(const Vintage& raw, const Vintage& filled, const QuarterlyDesign& design);

}  // namespace sparsecast
