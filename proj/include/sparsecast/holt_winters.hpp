#pragma once

#include <Eigen/Dense>

namespace sparsecast {

struct HoltWintersFit {
    double alpha = 0.0;
    double beta = 0.0;
    double level = 0.0;
    double trend = 0.0;
    double sse = 0.0;
};

/// Non-seasonal double exponential smoothing. Smoothing parameters are chosen
/// by in-sample one-step SSE over the {0.05, ..., 0.95}^2 grid.
HoltWintersFit holt_winters_fit(const Eigen::VectorXd& y);

Eigen::VectorXd holt_winters_forecast(const HoltWintersFit& fit, int h);

/// Convenience: fit then forecast h steps.
Eigen::VectorXd holt_winters(const Eigen::VectorXd& y, int h);

}  // namespace sparsecast
