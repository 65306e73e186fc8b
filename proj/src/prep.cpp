#include "sparsecast/prep.hpp"

#include <cmath>
#include <fstream>

#include "sparsecast/errors.hpp"
#include "sparsecast/rng.hpp"

namespace sparsecast {

namespace {

TimeSeries apply_hint(const TimeSeries& series, PrepLogEntry& entry) {
    const std::string& hint = series.transform_hint;
    bool log = false;
    int diffs = 0;
    if (hint == "none") {
    } else if (hint == "log") {
        log = true;
    } else if (hint == "diff") {
        diffs = 1;
    } else if (hint == "log_diff") {
        log = true;
        diffs = 1;
    } else if (hint == "diff2") {
        diffs = 2;
    } else if (hint == "log_diff2") {
        log = true;
        diffs = 2;
    } else {
        throw ValidationError("unknown transform hint '" + hint + "' for " + series.id);
    }

    TimeSeries out = series;
    out.transforms.clear();
    std::vector<double> values = series.values;
    if (log) {
        for (double v : values)
            if (v <= 0.0)
                throw NonPositiveValueError("log hint on non-positive series " + series.id);
        for (double& v : values) v = std::log(v);
        out.transforms.push_back(Transform::Log);
    }
    for (int d = 0; d < diffs; ++d) {
        std::vector<double> next(values.size() - 1);
        for (std::size_t t = 1; t < values.size(); ++t) next[t - 1] = values[t] - values[t - 1];
        values = std::move(next);
        out.transforms.push_back(Transform::Diff);
        out.start = out.start + (series.frequency == Frequency::Monthly ? 1 : 3);
    }
    out.values = std::move(values);
    entry.log_applied = log;
    entry.differences = diffs;
    return out;
}

}  // namespace

PreparedDataset prepare_dataset(const Dataset& raw, const StationarizeOptions& options) {
    PreparedDataset out;

    std::uint64_t salt = 0;
    for (const auto& series : raw.monthly) {
        PrepLogEntry entry;
        entry.id = series.id;
        StationarizeOptions per_series = options;
        per_series.seed = mix_seed(options.seed, ++salt);
        try {
            entry.spike_ratio = spike_ratio(series);
            if (entry.spike_ratio > 10.0) {
                entry.kept = false;
                entry.drop_reason = "spike ratio above 10";
                out.log.push_back(entry);
                continue;
            }
            if (!series.transform_hint.empty()) {
                // A fixed transform from the metadata overrides the estimation
                // loop, the way a curated series list carries its transform.
                TimeSeries fixed = apply_hint(series, entry);
                out.dataset.monthly.push_back(std::move(fixed));
            } else {
                const StationarizeResult result = stationarize(series, per_series);
                entry.box_cox = result.record.box_cox;
                entry.log_applied = result.record.log_applied;
                entry.differences = result.record.differences;
                entry.still_non_stationary = result.record.still_non_stationary;
                if (result.record.still_non_stationary) {
                    entry.kept = false;
                    entry.drop_reason = "still non-stationary after 2 differences";
                } else {
                    out.dataset.monthly.push_back(result.series);
                }
            }
        } catch (const std::exception& e) {
            entry.kept = false;
            entry.drop_reason = e.what();
        }
        out.log.push_back(entry);
    }

    // Targets pass through as supplied: the screening loop is for the monthly
    // indicator panel. A target that itself fails the stationarity tests is
    // flagged in the log so the caller can transform it upstream.
    for (const auto& target : raw.targets) {
        PrepLogEntry entry;
        entry.id = target.id;
        out.dataset.targets.push_back(target);
        try {
            StationarizeOptions per_series = options;
            per_series.seed = mix_seed(options.seed, ++salt);
            const StationarizeResult probe = stationarize(target, per_series);
            entry.box_cox = probe.record.box_cox;
            entry.differences = 0;
            if (probe.record.differences > 0 || probe.record.still_non_stationary)
                entry.drop_reason = "target looks non-stationary; supply it transformed";
        } catch (const std::exception& e) {
            entry.drop_reason = e.what();
        }
        out.log.push_back(entry);
    }
    return out;
}

void write_prep_log(const std::vector<PrepLogEntry>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write prep log " + path);
    out << "id,kept,drop_reason,spike_ratio,box_cox,log_applied,differences,still_non_stationary\n";
    for (const auto& e : log) {
        out << e.id << "," << (e.kept ? 1 : 0) << "," << e.drop_reason << "," << e.spike_ratio
            << "," << e.box_cox << "," << (e.log_applied ? 1 : 0) << "," << e.differences << ","
            << (e.still_non_stationary ? 1 : 0) << "\n";
    }
}

}  // namespace sparsecast
