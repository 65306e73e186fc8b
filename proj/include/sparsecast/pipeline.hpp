#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "sparsecast/time_series.hpp"

namespace sparsecast {

struct StationarizeOptions {
    int pp_bootstrap_reps = 999;
    std::uint64_t seed = 1;
    int max_differences = 2;
};

struct StationarizeResult {
    TimeSeries series;
    TransformRecord record;
};

/// The screening loop: log when the Box-Cox estimate is below 0.8 (and the
/// series is positive), then test with KPSS and ADF — falling back to the
/// bootstrap Phillips-Perron verdict when the ADF auxiliary residuals are
/// significantly heteroscedastic — and difference until both tests read the
/// series as stationary, capped at two differences. Hitting the cap flags the
/// result instead of throwing; the caller decides on exclusion.
StationarizeResult stationarize(const TimeSeries& series, const StationarizeOptions& options = {});

/// Invert a transform record (up to the observations lost to differencing).
std::vector<double> invert_transforms(const std::vector<double>& transformed,
                                      const TransformRecord& record);

/// Spike screen: keep unless (max - mean) / sd exceeds 10 (strictly).
bool spike_filter_keep(const TimeSeries& series);
double spike_ratio(const TimeSeries& series);

/// Quarterly aggregation by averaging the three months of each calendar
/// quarter; leading months before the first full quarter and the trailing
/// incomplete quarter are dropped.
TimeSeries monthly_to_quarterly(const TimeSeries& series);

Eigen::VectorXd to_vector(const TimeSeries& series);

}  // namespace sparsecast
