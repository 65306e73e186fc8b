#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparsecast/forecast_record.hpp"
#include "sparsecast/run_config.hpp"
#include "sparsecast/stat_tests.hpp"

namespace sparsecast {

/// RMSE over the records matching (model, horizon) with origin inside the
/// period; std::nullopt when fewer than 90% of the cells carry a value.
std::optional<double> rmse(const std::vector<ForecastRecord>& records, const std::string& model_id,
                           Horizon horizon, Quarter first, Quarter last);

/// RMSE over all matching records regardless of period; throws EmptySelection
/// when nothing matches.
double rmse_full(const std::vector<ForecastRecord>& records, const std::string& model_id,
                 Horizon horizon);

/// Diebold-Mariano test on squared-error loss differentials. HAC variance
/// with a rectangular kernel and horizon_steps-1 lags; the
/// Harvey-Leybourne-Newbold small-sample factor is applied and the p-value is
/// two-sided normal. Identical error series give statistic 0, p = 1 exactly.
TestResult dm_test(const Eigen::VectorXd& errors_a, const Eigen::VectorXd& errors_b,
                   int horizon_steps);

/// Unconditional Giacomini-White test (constant instrument): n dbar^2 / V with
/// the same HAC variance, chi-square(1) p-value.
TestResult gw_test(const Eigen::VectorXd& errors_a, const Eigen::VectorXd& errors_b,
                   int horizon_steps, bool window_is_rolling);

/// Unadjusted DM-type statistic and its pieces, shared by both tests.
struct LossDifferentialStat {
    double dbar = 0.0;
    double hac_variance = 0.0;
    double statistic = 0.0;  // sqrt(n) dbar / sqrt(V)
    int n = 0;
    bool degenerate = false;  // identically zero differential
};
LossDifferentialStat loss_differential_stat(const Eigen::VectorXd& errors_a,
                                            const Eigen::VectorXd& errors_b, int horizon_steps);

/// Ranked per-series selection counts; lags of one series collapse to a single
/// count per (model, origin) fit.
std::vector<std::pair<std::string, int>> selection_frequency(
    const std::vector<ForecastRecord>& records);

struct EvaluationReport {
    std::vector<std::string> model_ids;
    std::vector<Horizon> horizons;
    std::vector<PeriodSplit> periods;  // the sub-periods plus "full"
    std::string benchmark_id;

    // indexed [model][horizon][period]
    std::vector<std::vector<std::vector<std::optional<double>>>> rmse_by_split;
    std::vector<std::vector<std::vector<std::optional<double>>>> relative_rmse;

    // indexed [model_a][model_b][horizon], upper triangle (a < b)
    std::vector<std::vector<std::vector<std::optional<double>>>> dm_pvalues;
    std::vector<std::vector<std::vector<std::optional<double>>>> gw_pvalues;

    std::vector<std::pair<std::string, int>> selection_counts;

    std::uint64_t config_digest = 0;
    std::uint64_t data_digest = 0;
};

EvaluationReport build_report(const std::vector<ForecastRecord>& records, const RunConfig& config,
                              std::uint64_t data_digest);

}  // namespace sparsecast
