#include "sparsecast/stat_tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparsecast/errors.hpp"
#include "sparsecast/rng.hpp"
#include "sparsecast/stats_util.hpp"

namespace sparsecast {

namespace {

int bartlett_bandwidth(int n) { return static_cast<int>(std::floor(4.0 * std::pow(n / 100.0, 0.25))); }

// Linear interpolation of p against a table of (statistic, p) knots that is
// monotone in the statistic; clamped to the table's p range.
double interp_p(double stat, const double* stats, const double* ps, int count, bool increasing) {
    if (increasing) {
        if (stat <= stats[0]) return ps[0];
        if (stat >= stats[count - 1]) return ps[count - 1];
        for (int i = 1; i < count; ++i) {
            if (stat <= stats[i]) {
                const double w = (stat - stats[i - 1]) / (stats[i] - stats[i - 1]);
                return ps[i - 1] + w * (ps[i] - ps[i - 1]);
            }
        }
        return ps[count - 1];
    }
    if (stat >= stats[0]) return ps[0];
    if (stat <= stats[count - 1]) return ps[count - 1];
    for (int i = 1; i < count; ++i) {
        if (stat >= stats[i]) {
            const double w = (stat - stats[i - 1]) / (stats[i] - stats[i - 1]);
            return ps[i - 1] + w * (ps[i] - ps[i - 1]);
        }
    }
    return ps[count - 1];
}

}  // namespace

TestResult kpss_test(const Eigen::VectorXd& y) {
    const int n = static_cast<int>(y.size());
    if (n < 20) throw TooShortError("kpss_test needs at least 20 observations");

    const Eigen::VectorXd e = y.array() - y.mean();
    Eigen::VectorXd partial(n);
    double run = 0.0;
    for (int t = 0; t < n; ++t) { run += e(t); partial(t) = run; }

    const double lrv = newey_west_lrv(e, bartlett_bandwidth(n));
    const double stat = partial.squaredNorm() / (static_cast<double>(n) * n * lrv);

    // Kwiatkowski et al. (1992), level case, upper-tail critical values.
    static const double knots[4] = {0.347, 0.463, 0.574, 0.739};
    static const double pvals[4] = {0.10, 0.05, 0.025, 0.01};

    TestResult out;
    out.statistic = stat;
    out.p_value = interp_p(stat, knots, pvals, 4, true);
    out.reject_at_5pct = stat > 0.463;
    out.detail = "KPSS level; bandwidth " + std::to_string(bartlett_bandwidth(n)) +
                 "; p clamped to [0.01, 0.10]";
    return out;
}

namespace {

// MacKinnon (2010) response-surface critical values, cv = b0 + b1/T + b2/T^2 + b3/T^3.
// Rows: 1%, 5%, 10%.
const double kAdfConstCase[3][4] = {
    {-3.43035, -6.5393, -16.786, -79.433},
    {-2.86154, -2.8903, -4.234, -40.040},
    {-2.56677, -1.5384, -2.809, 0.0},
};
const double kAdfTrendCase[3][4] = {
    {-3.95877, -9.0531, -28.428, -134.155},
    {-3.41049, -4.3904, -9.036, -45.374},
    {-3.12705, -2.5856, -3.925, -22.380},
};

double adf_cv(const double (&table)[3][4], int row, int t_eff) {
    const double inv = 1.0 / t_eff;
    return table[row][0] + table[row][1] * inv + table[row][2] * inv * inv +
           table[row][3] * inv * inv * inv;
}

struct AdfOls {
    double t_rho = 0.0;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd regressors;  // without intercept
    int rows = 0;
    double aic = 0.0;
};

AdfOls adf_regression(const Eigen::VectorXd& y, int lags, int first_obs, bool trend_term) {
    const int n = static_cast<int>(y.size());
    const int rows = n - 1 - first_obs;
    const int deterministic = trend_term ? 2 : 1;
    Eigen::MatrixXd x(rows, deterministic + 1 + lags);
    Eigen::VectorXd dy(rows);
    for (int i = 0; i < rows; ++i) {
        const int t = first_obs + 1 + i;
        dy(i) = y(t) - y(t - 1);
        x(i, 0) = 1.0;
        if (trend_term) x(i, 1) = t;
        x(i, deterministic) = y(t - 1);
        for (int j = 0; j < lags; ++j)
            x(i, deterministic + 1 + j) = y(t - 1 - j) - y(t - 2 - j);
    }
    const OlsResult fit = ols_solve(x, dy);

    AdfOls out;
    out.rows = rows;
    out.t_rho = fit.std_errors(deterministic) > 0.0
                    ? fit.beta(deterministic) / fit.std_errors(deterministic)
                    : 0.0;
    out.residuals = fit.residuals;
    out.regressors = x.rightCols(x.cols() - 1);
    const double rss = fit.residuals.squaredNorm();
    out.aic =
        rows * std::log(std::max(rss / rows, 1e-300)) + 2.0 * (deterministic + 1 + lags);
    return out;
}

}  // namespace

AdfRegression adf_test_full(const Eigen::VectorXd& y_in, bool with_trend, int max_lags) {
    const int n = static_cast<int>(y_in.size());
    if (n < 30) throw TooShortError("adf_test needs at least 30 observations");

    const Eigen::VectorXd& y = y_in;
    bool detrended = false;
    if (with_trend) {
        // Deterministic part handled when the fitted trend is significant; the
        // trend then enters the ADF regression itself so the tabulated
        // trend-case distribution applies.
        Eigen::MatrixXd x(n, 2);
        for (int t = 0; t < n; ++t) { x(t, 0) = 1.0; x(t, 1) = t; }
        const OlsResult trend_fit = ols_solve(x, y);
        const double t_trend =
            trend_fit.std_errors(1) > 0.0 ? trend_fit.beta(1) / trend_fit.std_errors(1) : 0.0;
        if (std::fabs(t_trend) > 1.96) detrended = true;
    }

    const int kmax = max_lags >= 0
        ? max_lags
        : static_cast<int>(std::floor(12.0 * std::pow(n / 100.0, 0.25)));

    // Lag order by AIC over a common sample so the criteria are comparable.
    int best_k = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kmax; ++k) {
        const AdfOls cand = adf_regression(y, k, kmax, detrended);
        if (cand.aic < best_aic) { best_aic = cand.aic; best_k = k; }
    }
    const AdfOls final = adf_regression(y, best_k, best_k, detrended);

    const auto& table = detrended ? kAdfTrendCase : kAdfConstCase;
    const double cv1 = adf_cv(table, 0, final.rows);
    const double cv5 = adf_cv(table, 1, final.rows);
    const double cv10 = adf_cv(table, 2, final.rows);

    const double knots[3] = {cv10, cv5, cv1};  // decreasing statistic
    const double pvals[3] = {0.10, 0.05, 0.01};

    AdfRegression out;
    out.result.statistic = final.t_rho;
    out.result.p_value = interp_p(final.t_rho, knots, pvals, 3, false);
    out.result.reject_at_5pct = final.t_rho < cv5;
    out.result.detail = std::string("ADF ") + (detrended ? "(constant+trend)" : "(constant)") +
                        "; lags " + std::to_string(best_k) + "; p clamped to [0.01, 0.10]";
    out.residuals = final.residuals;
    out.regressors = final.regressors;
    out.lags = best_k;
    out.detrended = detrended;
    return out;
}

TestResult adf_test(const Eigen::VectorXd& y, bool with_trend, int max_lags) {
    return adf_test_full(y, with_trend, max_lags).result;
}

namespace {

double pp_z_tau(const Eigen::VectorXd& y) {
    const int n = static_cast<int>(y.size());
    const int rows = n - 1;
    Eigen::MatrixXd x(rows, 2);
    Eigen::VectorXd target(rows);
    for (int t = 0; t < rows; ++t) {
        x(t, 0) = 1.0;
        x(t, 1) = y(t);
        target(t) = y(t + 1);
    }
    const OlsResult fit = ols_solve(x, target);
    const double se_rho = fit.std_errors(1);
    const double t_rho = se_rho > 0.0 ? (fit.beta(1) - 1.0) / se_rho : 0.0;

    const double gamma0 = fit.residuals.squaredNorm() / rows;
    const double lrv = std::max(newey_west_lrv(fit.residuals, bartlett_bandwidth(rows)), 1e-300);
    const double s = std::sqrt(std::max(fit.sigma2, 1e-300));

    return std::sqrt(gamma0 / lrv) * t_rho -
           0.5 * (lrv - gamma0) / std::sqrt(lrv) * (rows * se_rho / s);
}

}  // namespace

TestResult pp_test(const Eigen::VectorXd& y, int bootstrap_reps, std::uint64_t seed) {
    const int n = static_cast<int>(y.size());
    if (n < 30) throw TooShortError("pp_test needs at least 30 observations");
    if (bootstrap_reps < 199) throw ValidationError("pp_test needs at least 199 bootstrap replications");

    const double stat = pp_z_tau(y);

    // Sieve bootstrap under the unit-root null: AR fit on the differences,
    // resampled residuals, re-integrated paths.
    Eigen::VectorXd dy(n - 1);
    for (int t = 1; t < n; ++t) dy(t - 1) = y(t) - y(t - 1);

    const int kmax = std::min(static_cast<int>(std::floor(12.0 * std::pow((n - 1) / 100.0, 0.25))),
                              (n - 1) / 4);
    int best_k = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_coef;
    Eigen::VectorXd best_resid;
    for (int k = 0; k <= kmax; ++k) {
        const int rows = static_cast<int>(dy.size()) - kmax;
        Eigen::MatrixXd x(rows, 1 + k);
        Eigen::VectorXd target(rows);
        for (int i = 0; i < rows; ++i) {
            const int t = kmax + i;
            x(i, 0) = 1.0;
            for (int j = 0; j < k; ++j) x(i, 1 + j) = dy(t - 1 - j);
            target(i) = dy(t);
        }
        const OlsResult fit = ols_solve(x, target);
        const double rss = fit.residuals.squaredNorm();
        const double aic = rows * std::log(std::max(rss / rows, 1e-300)) + 2.0 * (1 + k);
        if (aic < best_aic) {
            best_aic = aic;
            best_k = k;
            best_coef = fit.beta;
            best_resid = fit.residuals;
        }
    }
    Eigen::VectorXd centered = best_resid.array() - best_resid.mean();

    Rng rng(seed);
    std::vector<double> boot(bootstrap_reps);
    const int burn = 100;
    for (int rep = 0; rep < bootstrap_reps; ++rep) {
        Eigen::VectorXd sim_dy(n - 1);
        std::vector<double> state(best_k, 0.0);
        for (int t = -burn; t < n - 1; ++t) {
            double value = best_coef(0);
            for (int j = 0; j < best_k; ++j) value += best_coef(1 + j) * state[j];
            value += centered(rng.below(centered.size()));
            for (int j = best_k - 1; j > 0; --j) state[j] = state[j - 1];
            if (best_k > 0) state[0] = value;
            if (t >= 0) sim_dy(t) = value;
        }
        Eigen::VectorXd sim_y(n);
        sim_y(0) = y(0);
        for (int t = 1; t < n; ++t) sim_y(t) = sim_y(t - 1) + sim_dy(t - 1);
        boot[rep] = pp_z_tau(sim_y);
    }
    std::sort(boot.begin(), boot.end());

    int below = 0;
    for (double b : boot)
        if (b <= stat) ++below;

    TestResult out;
    out.statistic = stat;
    out.p_value = static_cast<double>(1 + below) / (bootstrap_reps + 1);
    out.reject_at_5pct = out.p_value < 0.05;
    out.detail = "PP Z-tau; sieve AR(" + std::to_string(best_k) + ") bootstrap, " +
                 std::to_string(bootstrap_reps) + " reps";
    return out;
}

TestResult breusch_pagan(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& regressors) {
    const int n = static_cast<int>(residuals.size());
    if (regressors.rows() != n) throw DimensionMismatchError("breusch_pagan: row mismatch");
    if (n < 20) throw TooShortError("breusch_pagan needs at least 20 observations");

    const int k = static_cast<int>(regressors.cols());
    Eigen::MatrixXd x(n, 1 + k);
    x.col(0).setOnes();
    x.rightCols(k) = regressors;

    const Eigen::VectorXd sq = residuals.array().square();
    const OlsResult aux = ols_solve(x, sq);

    TestResult out;
    out.statistic = n * aux.r_squared;
    out.p_value = chi2_sf(out.statistic, k);
    out.reject_at_5pct = out.p_value < 0.05;
    out.detail = "Breusch-Pagan LM, df " + std::to_string(k);
    return out;
}

double box_cox_lambda(const Eigen::VectorXd& y) {
    const int n = static_cast<int>(y.size());
    if ((y.array() <= 0.0).any()) throw NonPositiveValueError("box_cox_lambda needs positive values");

    const double log_sum = y.array().log().sum();

    Eigen::MatrixXd x(n, 2);
    for (int t = 0; t < n; ++t) { x(t, 0) = 1.0; x(t, 1) = t; }

    double best_lambda = -1.0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int step = 0; step <= 300; ++step) {
        const double lambda = -1.0 + step * 0.01;
        Eigen::VectorXd z(n);
        if (std::fabs(lambda) < 1e-12) {
            z = y.array().log();
        } else {
            z = (y.array().pow(lambda) - 1.0) / lambda;
        }
        const OlsResult fit = ols_solve(x, z);
        const double sigma2 = std::max(fit.residuals.squaredNorm() / n, 1e-300);
        const double ll = -0.5 * n * std::log(sigma2) + (lambda - 1.0) * log_sum;
        if (ll > best_ll) { best_ll = ll; best_lambda = lambda; }
    }
    return best_lambda;
}

}  // namespace sparsecast
