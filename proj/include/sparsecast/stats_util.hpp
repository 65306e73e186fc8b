#pragma once

#include <Eigen/Dense>

namespace sparsecast {

double normal_cdf(double x);

/// Upper tail P(chi2_df > x).
double chi2_sf(double x, int df);

/// Newey-West long-run variance with Bartlett weights and the given lag
/// truncation. Input is NOT demeaned here.
double newey_west_lrv(const Eigen::VectorXd& u, int lags);

struct OlsResult {
    Eigen::VectorXd beta;
    Eigen::VectorXd residuals;
    Eigen::VectorXd std_errors;
    double sigma2 = 0.0;   // residual sum of squares / (n - k)
    double r_squared = 0.0;
};

/// Plain least squares with standard errors; X includes any intercept column.
OlsResult ols_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

}  // namespace sparsecast
