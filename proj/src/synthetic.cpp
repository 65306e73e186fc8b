#include "sparsecast/synthetic.hpp"

#include <cmath>

#include "sparsecast/pipeline.hpp"
#include "sparsecast/rng.hpp"

namespace sparsecast {

SyntheticWorld generate_world(std::uint64_t seed, const WorldOptions& options) {
    SyntheticWorld world;
    Rng rng(seed);

    const int burn = 60;
    std::vector<TimeSeries> monthly(options.n_series);
    for (int i = 0; i < options.n_series; ++i) {
        TimeSeries& s = monthly[i];
        s.id = "S" + std::string(i + 1 < 10 ? "0" : "") + std::to_string(i + 1);
        s.frequency = Frequency::Monthly;
        s.start = options.start;
        s.release_lag_months = 1 + i % 3;
        s.sa_flag = true;
        s.transform_hint = "none";  // generated stationary; the metadata says so

        const double phi = 0.3 + 0.4 * rng.uniform();
        double value = 0.0;
        for (int t = 0; t < burn + options.months; ++t) {
            value = phi * value + rng.normal();
            if (t >= burn) s.values.push_back(value);
        }
    }

    // The first n_predictive series drive the target at quarterly lags 0, 1, 2, ...
    const double base_coefs[] = {1.5, -1.3, 1.2, 0.8, -0.9};
    for (int k = 0; k < options.n_predictive; ++k) {
        world.predictive_ids.push_back(monthly[k].id);
        world.predictive_lags.push_back(k % 3);
        world.coefficients.push_back(base_coefs[k % 5]);
    }

    std::vector<TimeSeries> quarterly(options.n_predictive);
    for (int k = 0; k < options.n_predictive; ++k) quarterly[k] = monthly_to_quarterly(monthly[k]);

    int max_lag = 0;
    for (int lag : world.predictive_lags) max_lag = std::max(max_lag, lag);

    TimeSeries target;
    target.id = options.target_id;
    target.frequency = Frequency::Quarterly;
    const Quarter q_start = quarterly[0].start_quarter() + max_lag;
    target.start = q_start.first_month();
    const int n_quarters = quarterly[0].size() - max_lag;
    for (int t = 0; t < n_quarters; ++t) {
        double value = rng.normal() * options.noise_sd;
        for (int k = 0; k < options.n_predictive; ++k) {
            const int idx = (q_start + t) - quarterly[k].start_quarter() - world.predictive_lags[k];
            value += world.coefficients[k] * quarterly[k].values[idx];
        }
        target.values.push_back(value);
    }

    world.dataset.monthly = std::move(monthly);
    world.dataset.targets.push_back(std::move(target));
    return world;
}

}  // namespace sparsecast
