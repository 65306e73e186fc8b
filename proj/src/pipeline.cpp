#include "sparsecast/pipeline.hpp"

#include <cmath>

#include "sparsecast/errors.hpp"
#include "sparsecast/rng.hpp"
#include "sparsecast/stat_tests.hpp"

namespace sparsecast {

Eigen::VectorXd to_vector(const TimeSeries& series) {
    return Eigen::Map<const Eigen::VectorXd>(series.values.data(), series.values.size());
}

namespace {

// Stationary verdict per the screening rule: non-stationary if either the
// KPSS rejects stationarity or the unit-root test fails to reject the root.
// The PP verdict replaces the ADF one only when the ADF residuals are
// significantly heteroscedastic.
bool is_stationary(const Eigen::VectorXd& y, const StationarizeOptions& options,
                   std::uint64_t salt) {
    const TestResult kpss = kpss_test(y);
    const AdfRegression adf = adf_test_full(y, true);

    bool unit_root_rejected = adf.result.reject_at_5pct;
    const TestResult bp = breusch_pagan(adf.residuals, adf.regressors);
    if (bp.reject_at_5pct) {
        const TestResult pp = pp_test(y, options.pp_bootstrap_reps, mix_seed(options.seed, salt));
        unit_root_rejected = pp.reject_at_5pct;
    }
    return !kpss.reject_at_5pct && unit_root_rejected;
}

}  // namespace

StationarizeResult stationarize(const TimeSeries& series, const StationarizeOptions& options) {
    if (series.size() < 40) throw TooShortError("stationarize needs at least 40 observations");

    StationarizeResult out;
    out.series = series;
    out.series.transforms.clear();

    Eigen::VectorXd y = to_vector(series);

    const bool all_positive = (y.array() > 0.0).all();
    if (all_positive) {
        out.record.box_cox = box_cox_lambda(y);
        if (out.record.box_cox < 0.8) {
            y = y.array().log();
            out.record.log_applied = true;
            out.series.transforms.push_back(Transform::Log);
        }
    }

    int diffs = 0;
    while (!is_stationary(y, options, diffs)) {
        if (diffs >= options.max_differences) {
            out.record.still_non_stationary = true;
            break;
        }
        out.record.initial_values.push_back(y(0));
        Eigen::VectorXd dy(y.size() - 1);
        for (int t = 1; t < y.size(); ++t) dy(t - 1) = y(t) - y(t - 1);
        y = dy;
        ++diffs;
        out.series.transforms.push_back(Transform::Diff);
    }
    out.record.differences = diffs;

    out.series.start = series.start + diffs * (series.frequency == Frequency::Monthly ? 1 : 3);
    out.series.values.assign(y.data(), y.data() + y.size());
    return out;
}

std::vector<double> invert_transforms(const std::vector<double>& transformed,
                                      const TransformRecord& record) {
    std::vector<double> values = transformed;
    for (int d = record.differences - 1; d >= 0; --d) {
        std::vector<double> undone(values.size() + 1);
        undone[0] = record.initial_values[d];
        for (std::size_t t = 0; t < values.size(); ++t) undone[t + 1] = undone[t] + values[t];
        values = std::move(undone);
    }
    if (record.log_applied)
        for (double& v : values) v = std::exp(v);
    return values;
}

double spike_ratio(const TimeSeries& series) {
    if (series.size() < 20) throw TooShortError("spike_filter needs at least 20 observations");
    const Eigen::VectorXd y = to_vector(series);
    const double mean = y.mean();
    const double sd = std::sqrt((y.array() - mean).square().sum() / y.size());
    if (sd < 1e-12) throw ZeroVarianceError("spike_filter: zero variance");
    return (y.maxCoeff() - mean) / sd;
}

bool spike_filter_keep(const TimeSeries& series) {
    return spike_ratio(series) <= 10.0;
}

TimeSeries monthly_to_quarterly(const TimeSeries& series) {
    if (series.frequency != Frequency::Monthly)
        throw FrequencyMismatchError("monthly_to_quarterly expects a monthly series");

    // Advance to the first month that opens a quarter.
    int offset = 0;
    while (offset < series.size() && month_of_quarter(series.start + offset) != 1) ++offset;

    TimeSeries out;
    out.id = series.id;
    out.frequency = Frequency::Quarterly;
    out.release_lag_months = series.release_lag_months;
    out.transforms = series.transforms;
    out.sa_flag = series.sa_flag;
    out.start = series.start + offset;

    const int full_quarters = (series.size() - offset) / 3;
    out.values.resize(full_quarters);
    for (int k = 0; k < full_quarters; ++k) {
        const int base = offset + 3 * k;
        out.values[k] = (series.values[base] + series.values[base + 1] + series.values[base + 2]) / 3.0;
    }

    if (series.has_synthetic()) {
        // A quarter is synthetic as soon as any of its months is.
        const int first_synth_quarter = (series.synthetic_from - offset) / 3;
        if (first_synth_quarter < full_quarters)
            out.synthetic_from = std::max(first_synth_quarter, 0);
    }
    return out;
}

}  // namespace sparsecast
