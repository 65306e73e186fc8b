#include "sparsecast/vintage.hpp"

#include <algorithm>
#include <cmath>

#include "sparsecast/arma.hpp"
#include "sparsecast/errors.hpp"
#include "sparsecast/holt_winters.hpp"
#include "sparsecast/pipeline.hpp"

namespace sparsecast {

const TimeSeries& Dataset::target(const std::string& id) const {
    for (const auto& t : targets)
        if (t.id == id) return t;
    throw UnknownSeriesError(id);
}

namespace {

TimeSeries truncate_to(const TimeSeries& series, Month last_allowed) {
    TimeSeries out = series;
    const int keep = std::min<int>(series.size(), last_allowed - series.start + 1);
    out.values.resize(std::max(keep, 0));
    return out;
}

}  // namespace

Vintage build_vintage(const Dataset& dataset, const std::string& target_id, Month as_of) {
    Vintage vintage;
    vintage.as_of = as_of;
    vintage.month_of_quarter = month_of_quarter(as_of);

    for (const auto& series : dataset.monthly) {
        if (series.release_lag_months < 0 || series.release_lag_months > 12)
            throw MissingMetadataError(series.id);
        if (!series.sa_flag)
            throw ValidationError("series " + series.id + " is not seasonally adjusted");
        vintage.series.push_back(truncate_to(series, as_of - series.release_lag_months));
    }

    // The previous quarter is the backcast target, so publication ends two
    // quarters before the origin.
    const TimeSeries& target = dataset.target(target_id);
    const Quarter last_published = quarter_of(as_of) - 2;
    TimeSeries hist = target;
    const int keep = std::min<int>(target.size(), last_published - target.start_quarter() + 1);
    hist.values.resize(std::max(keep, 0));
    vintage.target_history = hist;
    return vintage;
}

Vintage fill_ragged_edges(const Vintage& vintage, FillMethod method,
                          const ArmaFitOptions& arma_options) {
    const Quarter origin = quarter_of(vintage.as_of);
    const Month end_needed = (origin + 2).last_month();

    Vintage filled = vintage;
    for (auto& series : filled.series) {
        const int gap = end_needed - series.last_month();
        if (gap <= 0) continue;
        if (gap > 9) throw GapTooLongError(series.id, gap);

        const Eigen::VectorXd y = to_vector(series);
        Eigen::VectorXd fills;
        if (method == FillMethod::Arma) {
            const ArmaModel model = fit_arma(y, arma_options);
            fills = forecast_arma(model, y, gap);
        } else {
            fills = holt_winters(y, gap);
        }
        series.synthetic_from = series.size();
        for (int i = 0; i < gap; ++i) series.values.push_back(fills(i));
    }
    return filled;
}

QuarterlyDesign build_design(const Vintage& filled, const std::string& target_id,
                             const BuildDesignOptions& options) {
    if (filled.target_history.id != target_id)
        throw ValidationError("build_design: vintage holds target " + filled.target_history.id +
                              ", not " + target_id);
    const Quarter origin = quarter_of(filled.as_of);
    const int max_lag = options.max_lag_quarters;

    std::vector<TimeSeries> quarterly;
    quarterly.reserve(filled.series.size());
    for (const auto& series : filled.series) quarterly.push_back(monthly_to_quarterly(series));

    // Feasible training rows: every lagged column exists and the target is
    // published.
    Quarter row_start = filled.target_history.start_quarter();
    for (const auto& q : quarterly) {
        const Quarter earliest = q.start_quarter() + max_lag;
        if (earliest > row_start) row_start = earliest;
    }
    if (options.window_start && *options.window_start > row_start)
        row_start = *options.window_start;
    const Quarter row_end = filled.target_history.last_quarter();

    const int n_rows = row_end - row_start + 1;
    if (n_rows < options.min_overlap_quarters)
        throw InsufficientOverlapError("only " + std::to_string(n_rows) +
                                       " aligned quarters, need " +
                                       std::to_string(options.min_overlap_quarters));

    const int p = static_cast<int>(quarterly.size()) * (max_lag + 1);
    Eigen::MatrixXd raw(n_rows, p);
    Eigen::VectorXd target(n_rows);
    std::vector<ColumnMeta> columns(p);

    QuarterlyDesign out;
    out.row_quarters.resize(n_rows);
    for (int r = 0; r < n_rows; ++r) {
        const Quarter s = row_start + r;
        out.row_quarters[r] = s;
        target(r) = filled.target_history.values[s - filled.target_history.start_quarter()];
    }

    int col = 0;
    for (const auto& q : quarterly) {
        for (int lag = 0; lag <= max_lag; ++lag, ++col) {
            columns[col] = ColumnMeta{q.id, lag};
            for (int r = 0; r < n_rows; ++r) {
                const Quarter s = (row_start + r) - lag;
                raw(r, col) = q.values[s - q.start_quarter()];
            }
        }
    }

    out.design = DesignMatrix::standardize(raw, target, columns);

    out.prediction_quarters = {origin - 1, origin, origin + 1, origin + 2};
    out.prediction_raw.resize(4, p);
    out.prediction_synthetic_months.resize(4, p);
    out.prediction_synthetic_months.setZero();
    for (int h = 0; h < 4; ++h) {
        col = 0;
        for (std::size_t i = 0; i < quarterly.size(); ++i) {
            const auto& q = quarterly[i];
            for (int lag = 0; lag <= max_lag; ++lag, ++col) {
                const Quarter s = out.prediction_quarters[h] - lag;
                const int idx = s - q.start_quarter();
                if (idx < 0 || idx >= q.size())
                    throw InsufficientOverlapError("prediction quarter " + s.str() +
                                                   " missing for " + q.id);
                out.prediction_raw(h, col) = q.values[idx];

                const auto& monthly = filled.series[i];
                if (monthly.has_synthetic()) {
                    const Month first_synth = monthly.start + monthly.synthetic_from;
                    for (Month m = s.first_month(); m <= s.last_month(); ++m)
                        if (m >= first_synth) out.prediction_synthetic_months(h, col) += 1.0;
                }
            }
        }
    }
    return out;
}

int audit_no_look_ahead(const Vintage& raw, const Vintage& filled, const QuarterlyDesign& design) {
    int violations = 0;

    for (std::size_t i = 0; i < raw.series.size(); ++i) {
        const auto& observed = raw.series[i];
        const auto& complete = filled.series[i];

        // Truncation respects the release lag.
        if (observed.size() > 0 &&
            observed.last_month() > raw.as_of - observed.release_lag_months)
            ++violations;

        // Fills start right after the observable edge and never rewrite it.
        const int expected_synth = observed.size();
        if (complete.size() > observed.size()) {
            if (complete.synthetic_from != expected_synth) ++violations;
            for (int t = 0; t < observed.size(); ++t)
                if (complete.values[t] != observed.values[t]) { ++violations; break; }
        } else if (complete.has_synthetic()) {
            ++violations;
        }
    }

    // Published target history ends at the backcast boundary.
    if (raw.target_history.size() > 0 &&
        raw.target_history.last_quarter() > quarter_of(raw.as_of) - 2)
        ++violations;

    // Training rows stay inside the published target span.
    if (!design.row_quarters.empty() &&
        design.row_quarters.back() > quarter_of(raw.as_of) - 2)
        ++violations;

    return violations;
}

}  // namespace sparsecast
