#pragma once

#include <string>
#include <vector>

#include "sparsecast/calendar.hpp"

namespace sparsecast {

enum class Frequency { Monthly, Quarterly };
enum class Transform { Log, Diff };

/// A dated observation sequence. Values run contiguously from `start`; the
/// ragged edge is implicit in where the vector ends. Synthetic (forecast-fill)
/// values, when present, occupy the tail from `synthetic_from` on.
struct TimeSeries {
    std::string id;
    Frequency frequency = Frequency::Monthly;
    Month start{1900, 1};  // for quarterly series this is the first month of the start quarter
    std::vector<double> values;
    int release_lag_months = 0;
    std::vector<Transform> transforms;  // ordered, log before differences, at most 3 entries
    bool sa_flag = true;
    int synthetic_from = -1;  // index of first synthetic value, -1 = none
    // Fixed transform from the metadata ("none", "log", "diff", "log_diff",
    // "diff2"); empty means the screening loop decides.
    std::string transform_hint;

    int size() const { return static_cast<int>(values.size()); }
    Month last_month() const { return start + (size() - 1); }

    Quarter start_quarter() const { return quarter_of(start); }
    Quarter last_quarter() const {
        return frequency == Frequency::Quarterly ? start_quarter() + (size() - 1)
                                                 : quarter_of(last_month());
    }

    bool has_synthetic() const { return synthetic_from >= 0; }
};

/// Inversion data for a stationarization: initial values lost to each
/// difference, and whether a log was applied first.
struct TransformRecord {
    bool log_applied = false;
    int differences = 0;
    std::vector<double> initial_values;  // one per difference, in application order
    bool still_non_stationary = false;
    double box_cox = 1.0;
};

}  // namespace sparsecast
