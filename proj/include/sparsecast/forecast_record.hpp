#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sparsecast/calendar.hpp"
#include "sparsecast/design_matrix.hpp"

namespace sparsecast {

enum class Horizon { Backcast, Nowcast, Fore1Q, Fore2Q };

const char* horizon_name(Horizon h);
Horizon horizon_from_name(const std::string& name);

/// Quarters between the last published target and the horizon's target
/// quarter; the HAC lag order of the comparison tests keys off this.
inline int horizon_steps(Horizon h) { return static_cast<int>(h) + 1; }

struct ForecastRecord {
    std::string target_id;
    Quarter origin;            // the nowcast quarter at this origin
    Horizon horizon = Horizon::Nowcast;
    std::string model_id;
    std::optional<double> point;     // empty: horizon not produced or the cell failed
    std::optional<double> realized;  // filled once the evaluation sample closes
    std::vector<ColumnMeta> active_columns;
    bool failed = false;

    Quarter target_quarter() const { return origin + (static_cast<int>(horizon) - 1); }
};

}  // namespace sparsecast
