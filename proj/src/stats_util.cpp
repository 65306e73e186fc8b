#include "sparsecast/stats_util.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparsecast {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace {

// Regularized lower incomplete gamma P(a, x), series + continued fraction.
double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // series representation
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // continued fraction for Q(a, x)
    const double tiny = std::numeric_limits<double>::min() / 1e-30;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

}  // namespace

double chi2_sf(double x, int df) {
    if (x <= 0.0) return 1.0;
    return 1.0 - gamma_p(0.5 * df, 0.5 * x);
}

double newey_west_lrv(const Eigen::VectorXd& u, int lags) {
    const int n = static_cast<int>(u.size());
    double lrv = u.squaredNorm() / n;
    for (int j = 1; j <= lags; ++j) {
        if (j >= n) break;
        double gamma = 0.0;
        for (int t = j; t < n; ++t) gamma += u(t) * u(t - j);
        gamma /= n;
        lrv += 2.0 * (1.0 - static_cast<double>(j) / (lags + 1)) * gamma;
    }
    return lrv;
}

OlsResult ols_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.rows() != y.size()) throw std::invalid_argument("ols_solve: row mismatch");
    const int n = static_cast<int>(x.rows());
    const int k = static_cast<int>(x.cols());

    Eigen::MatrixXd xtx = x.transpose() * x;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    OlsResult out;
    out.beta = ldlt.solve(x.transpose() * y);
    out.residuals = y - x * out.beta;

    const double rss = out.residuals.squaredNorm();
    out.sigma2 = n > k ? rss / (n - k) : 0.0;

    Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k)) * out.sigma2;
    out.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();

    const double mean_y = y.mean();
    const double tss = (y.array() - mean_y).matrix().squaredNorm();
    out.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;
    return out;
}

}  // namespace sparsecast
