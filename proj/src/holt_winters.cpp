#include "sparsecast/holt_winters.hpp"

#include "sparsecast/errors.hpp"

namespace sparsecast {

namespace {

// One smoothing pass; returns SSE of one-step errors and the final state.
double smooth(const Eigen::VectorXd& y, double alpha, double beta, double* level_out,
              double* trend_out) {
    const int n = static_cast<int>(y.size());
    double level = y(0);
    double trend = y(1) - y(0);
    double sse = 0.0;
    for (int t = 1; t < n; ++t) {
        const double pred = level + trend;
        const double err = y(t) - pred;
        sse += err * err;
        const double prev_level = level;
        level = alpha * y(t) + (1.0 - alpha) * (level + trend);
        trend = beta * (level - prev_level) + (1.0 - beta) * trend;
    }
    *level_out = level;
    *trend_out = trend;
    return sse;
}

}  // namespace

HoltWintersFit holt_winters_fit(const Eigen::VectorXd& y) {
    if (y.size() < 10) throw TooShortError("holt_winters needs at least 10 observations");

    HoltWintersFit best;
    bool have_best = false;
    for (int a = 1; a <= 19; ++a) {
        for (int b = 1; b <= 19; ++b) {
            const double alpha = a * 0.05;
            const double beta = b * 0.05;
            double level = 0.0, trend = 0.0;
            const double sse = smooth(y, alpha, beta, &level, &trend);
            if (!have_best || sse < best.sse) {
                best = {alpha, beta, level, trend, sse};
                have_best = true;
            }
        }
    }
    return best;
}

Eigen::VectorXd holt_winters_forecast(const HoltWintersFit& fit, int h) {
    if (h < 1) throw HorizonZeroError("forecast horizon must be positive");
    Eigen::VectorXd out(h);
    for (int step = 1; step <= h; ++step) out(step - 1) = fit.level + step * fit.trend;
    return out;
}

Eigen::VectorXd holt_winters(const Eigen::VectorXd& y, int h) {
    return holt_winters_forecast(holt_winters_fit(y), h);
}

}  // namespace sparsecast
