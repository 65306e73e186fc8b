#include "sparsecast/report.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "sparsecast/errors.hpp"
#include "sparsecast/stats_util.hpp"

namespace sparsecast {

const char* horizon_name(Horizon h) {
    switch (h) {
        case Horizon::Backcast: return "backcast";
        case Horizon::Nowcast: return "nowcast";
        case Horizon::Fore1Q: return "fore1q";
        case Horizon::Fore2Q: return "fore2q";
    }
    return "?";
}

Horizon horizon_from_name(const std::string& name) {
    if (name == "backcast") return Horizon::Backcast;
    if (name == "nowcast") return Horizon::Nowcast;
    if (name == "fore1q") return Horizon::Fore1Q;
    if (name == "fore2q") return Horizon::Fore2Q;
    throw ValidationError("unknown horizon: " + name);
}

namespace {

struct CellStats {
    int total = 0;
    int available = 0;
    double sq_sum = 0.0;
};

CellStats collect(const std::vector<ForecastRecord>& records, const std::string& model_id,
                  Horizon horizon, std::optional<Quarter> first, std::optional<Quarter> last) {
    CellStats out;
    for (const auto& r : records) {
        if (r.model_id != model_id || r.horizon != horizon) continue;
        if (first && r.origin < *first) continue;
        if (last && r.origin > *last) continue;
        ++out.total;
        if (r.point && r.realized) {
            ++out.available;
            const double e = *r.point - *r.realized;
            out.sq_sum += e * e;
        }
    }
    return out;
}

}  // namespace

std::optional<double> rmse(const std::vector<ForecastRecord>& records, const std::string& model_id,
                           Horizon horizon, Quarter first, Quarter last) {
    const CellStats stats = collect(records, model_id, horizon, first, last);
    if (stats.total == 0) return std::nullopt;
    if (stats.available < 0.9 * stats.total || stats.available == 0) return std::nullopt;
    return std::sqrt(stats.sq_sum / stats.available);
}

double rmse_full(const std::vector<ForecastRecord>& records, const std::string& model_id,
                 Horizon horizon) {
    const CellStats stats = collect(records, model_id, horizon, std::nullopt, std::nullopt);
    if (stats.available == 0) throw EmptySelectionError("rmse: no matching records");
    return std::sqrt(stats.sq_sum / stats.available);
}

LossDifferentialStat loss_differential_stat(const Eigen::VectorXd& errors_a,
                                            const Eigen::VectorXd& errors_b, int horizon_steps) {
    if (errors_a.size() != errors_b.size())
        throw DimensionMismatchError("loss differential: length mismatch");
    const int n = static_cast<int>(errors_a.size());
    if (n < 10) throw TooShortError("loss differential needs at least 10 observations");

    Eigen::VectorXd d = errors_a.array().square() - errors_b.array().square();

    LossDifferentialStat out;
    out.n = n;
    out.dbar = d.mean();
    if (d.cwiseAbs().maxCoeff() == 0.0) {
        out.degenerate = true;
        return out;
    }

    // rectangular-kernel HAC with horizon_steps - 1 lags
    const Eigen::VectorXd centered = d.array() - out.dbar;
    double v = centered.squaredNorm() / n;
    const int lags = std::max(horizon_steps - 1, 0);
    for (int j = 1; j <= lags && j < n; ++j) {
        double gamma = 0.0;
        for (int t = j; t < n; ++t) gamma += centered(t) * centered(t - j);
        v += 2.0 * gamma / n;
    }
    if (v <= 0.0) v = centered.squaredNorm() / n;  // rectangular kernel can go negative

    out.hac_variance = v;
    out.statistic = out.dbar / std::sqrt(v / n);
    return out;
}

TestResult dm_test(const Eigen::VectorXd& errors_a, const Eigen::VectorXd& errors_b,
                   int horizon_steps) {
    const LossDifferentialStat base = loss_differential_stat(errors_a, errors_b, horizon_steps);

    TestResult out;
    if (base.degenerate) {
        out.statistic = 0.0;
        out.p_value = 1.0;
        out.detail = "identical loss series";
        return out;
    }

    const double n = base.n;
    const double h = horizon_steps;
    const double harvey = std::sqrt((n + 1.0 - 2.0 * h + h * (h - 1.0) / n) / n);
    out.statistic = base.statistic * harvey;
    out.p_value = 2.0 * (1.0 - normal_cdf(std::fabs(out.statistic)));
    out.reject_at_5pct = out.p_value < 0.05;
    out.detail = "DM, HLN-adjusted, rectangular HAC with " +
                 std::to_string(std::max(horizon_steps - 1, 0)) + " lags";
    return out;
}

TestResult gw_test(const Eigen::VectorXd& errors_a, const Eigen::VectorXd& errors_b,
                   int horizon_steps, bool window_is_rolling) {
    const LossDifferentialStat base = loss_differential_stat(errors_a, errors_b, horizon_steps);

    TestResult out;
    if (base.degenerate) {
        out.statistic = 0.0;
        out.p_value = 1.0;
        out.detail = "identical loss series";
        return out;
    }

    out.statistic = base.statistic * base.statistic;  // n dbar^2 / V
    out.p_value = chi2_sf(out.statistic, 1);
    out.reject_at_5pct = out.p_value < 0.05;
    out.detail = std::string("GW, unconditional (constant instrument)");
    if (!window_is_rolling) out.detail += "; warning: errors not from a rolling window";
    return out;
}

std::vector<std::pair<std::string, int>> selection_frequency(
    const std::vector<ForecastRecord>& records) {
    // Lags collapse per series; the four horizon records of one (model, origin)
    // fit count once.
    std::set<std::tuple<std::string, int, std::string>> seen;  // model, origin idx, series
    std::map<std::string, int> counts;
    for (const auto& r : records) {
        for (const auto& col : r.active_columns) {
            const auto key = std::make_tuple(r.model_id, r.origin - Quarter(1900, 1), col.series_id);
            if (seen.insert(key).second) counts[col.series_id] += 1;
        }
    }
    std::vector<std::pair<std::string, int>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranked;
}

EvaluationReport build_report(const std::vector<ForecastRecord>& records, const RunConfig& config,
                              std::uint64_t data_digest) {
    EvaluationReport report;
    report.config_digest = config_digest(config);
    report.data_digest = data_digest;
    report.horizons = {Horizon::Backcast, Horizon::Nowcast, Horizon::Fore1Q, Horizon::Fore2Q};

    for (const auto& m : config.models) {
        report.model_ids.push_back(m.id);
        if (m.is_arma_benchmark) report.benchmark_id = m.id;
    }

    report.periods = config.effective_splits();
    report.periods.push_back({"full", config.eval_start, config.eval_end});

    const std::size_t n_models = report.model_ids.size();
    const std::size_t n_h = report.horizons.size();
    const std::size_t n_p = report.periods.size();

    report.rmse_by_split.assign(
        n_models, std::vector<std::vector<std::optional<double>>>(
                      n_h, std::vector<std::optional<double>>(n_p)));
    report.relative_rmse = report.rmse_by_split;

    int benchmark_idx = -1;
    for (std::size_t i = 0; i < n_models; ++i)
        if (report.model_ids[i] == report.benchmark_id) benchmark_idx = static_cast<int>(i);

    for (std::size_t m = 0; m < n_models; ++m)
        for (std::size_t h = 0; h < n_h; ++h)
            for (std::size_t p = 0; p < n_p; ++p)
                report.rmse_by_split[m][h][p] =
                    rmse(records, report.model_ids[m], report.horizons[h],
                         report.periods[p].first, report.periods[p].last);

    for (std::size_t m = 0; m < n_models; ++m)
        for (std::size_t h = 0; h < n_h; ++h)
            for (std::size_t p = 0; p < n_p; ++p) {
                if (benchmark_idx < 0) continue;
                const auto& own = report.rmse_by_split[m][h][p];
                const auto& bench = report.rmse_by_split[benchmark_idx][h][p];
                if (own && bench && *bench > 0.0)
                    report.relative_rmse[m][h][p] = *own / *bench;
            }

    // Pairwise tests on the aligned error series of each horizon.
    auto aligned_errors = [&](const std::string& a, const std::string& b, Horizon h) {
        std::map<int, double> ea, eb;
        for (const auto& r : records) {
            if (r.horizon != h || !r.point || !r.realized) continue;
            const int key = r.origin - Quarter(1900, 1);
            if (r.model_id == a) ea[key] = *r.point - *r.realized;
            if (r.model_id == b) eb[key] = *r.point - *r.realized;
        }
        std::vector<double> va, vb;
        for (const auto& [key, value] : ea) {
            auto it = eb.find(key);
            if (it != eb.end()) { va.push_back(value); vb.push_back(it->second); }
        }
        return std::make_pair(Eigen::Map<Eigen::VectorXd>(va.data(), va.size()).eval(),
                              Eigen::Map<Eigen::VectorXd>(vb.data(), vb.size()).eval());
    };

    auto pair_table = [&](bool rolling) {
        std::vector<std::vector<std::vector<std::optional<double>>>> table(
            n_models, std::vector<std::vector<std::optional<double>>>(
                          n_models, std::vector<std::optional<double>>(n_h)));
        for (std::size_t a = 0; a < n_models; ++a) {
            for (std::size_t b = a + 1; b < n_models; ++b) {
                for (std::size_t h = 0; h < n_h; ++h) {
                    const auto [ea, eb] =
                        aligned_errors(report.model_ids[a], report.model_ids[b], report.horizons[h]);
                    if (ea.size() < 10) continue;
                    const int steps = horizon_steps(report.horizons[h]);
                    table[a][b][h] = rolling ? gw_test(ea, eb, steps, true).p_value
                                             : dm_test(ea, eb, steps).p_value;
                }
            }
        }
        return table;
    };

    if (config.window_mode == WindowMode::Rolling)
        report.gw_pvalues = pair_table(true);
    else
        report.dm_pvalues = pair_table(false);

    report.selection_counts = selection_frequency(records);
    return report;
}

}  // namespace sparsecast
