#pragma once

#include <cstdint>

#include "sparsecast/vintage.hpp"

namespace sparsecast {

struct WorldOptions {
    int n_series = 30;
    int n_predictive = 3;
    Month start{1989, 1};
    int months = 216;
    double noise_sd = 0.3;
    std::string target_id = "Y";
};

/// A seeded simulated economy: stationary AR(1) monthly indicators with
/// staggered release lags (1, 2, 3 months, cycled), of which the first few
/// drive a quarterly target at known quarterly lags.
struct SyntheticWorld {
    Dataset dataset;
    std::vector<std::string> predictive_ids;
    std::vector<int> predictive_lags;  // quarterly lag per predictive series
    std::vector<double> coefficients;
};

SyntheticWorld generate_world(std::uint64_t seed, const WorldOptions& options = {});

}  // namespace sparsecast
