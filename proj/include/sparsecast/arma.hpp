#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sparsecast {

/// ARMA(p, q) with intercept, fitted by conditional sum of squares.
struct ArmaModel {
    int p = 0;
    int q = 0;
    int d = 0;                 // differencing applied by the caller, recorded only
    Eigen::VectorXd ar;        // length p
    Eigen::VectorXd ma;        // length q
    double intercept = 0.0;
    double sigma2 = 0.0;       // CSS / n_used
    double aic = 0.0;          // n_used * ln(sigma2) + 2 (p + q + 1)
    int n_used = 0;
    int conditioned_on = 0;    // initial observations the CSS recursion skipped
    std::string note;          // skipped candidates etc.

    double mean() const;       // unconditional mean, intercept / (1 - sum ar)
};

struct ArmaFitOptions {
    int max_p = 4;
    int max_q = 2;
    // All candidates condition on the same number of initial observations so
    // their AICs are comparable.
};

/// Grid-search (p, q) up to the caps, Hannan-Rissanen start values refined by
/// Nelder-Mead on the conditional sum of squares; returns the AIC minimizer.
/// Candidates with AR roots inside the unit circle (or non-invertible MA) are
/// skipped with a note.
ArmaModel fit_arma(const Eigen::VectorXd& y, const ArmaFitOptions& options = {});

/// Fit one fixed (p, q), conditioning on `condition_on` initial observations
/// (-1 = max(p, q)).
ArmaModel fit_arma_fixed(const Eigen::VectorXd& y, int p, int q, int condition_on = -1);

/// Iterated conditional-expectation forecasts, h steps ahead.
Eigen::VectorXd forecast_arma(const ArmaModel& model, const Eigen::VectorXd& y, int h);

/// In-sample one-step residuals under the CSS recursion (zeros before the
/// conditioning point).
Eigen::VectorXd arma_residuals(const ArmaModel& model, const Eigen::VectorXd& y);

}  // namespace sparsecast
