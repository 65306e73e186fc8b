#include "sparsecast/arma.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "sparsecast/errors.hpp"
#include "sparsecast/stats_util.hpp"

namespace sparsecast {

namespace {

// Spectral radius of the AR/MA companion matrix; < 1 means roots of the
// characteristic polynomial lie outside the unit circle.
double companion_radius(const Eigen::VectorXd& coef) {
    const int m = static_cast<int>(coef.size());
    if (m == 0) return 0.0;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    companion.row(0) = coef.transpose();
    for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    return companion.eigenvalues().cwiseAbs().maxCoeff();
}

// CSS recursion: residuals for t >= start, zero-initialized shocks.
double css(const Eigen::VectorXd& y, const Eigen::VectorXd& params, int p, int q, int start,
           Eigen::VectorXd* residuals_out = nullptr) {
    const int n = static_cast<int>(y.size());
    const double c = params(0);
    Eigen::VectorXd eps = Eigen::VectorXd::Zero(n);
    double total = 0.0;
    for (int t = start; t < n; ++t) {
        double pred = c;
        for (int i = 0; i < p; ++i) pred += params(1 + i) * y(t - 1 - i);
        for (int j = 0; j < q; ++j)
            if (t - 1 - j >= start) pred += params(1 + p + j) * eps(t - 1 - j);
        eps(t) = y(t) - pred;
        if (!std::isfinite(eps(t))) return std::numeric_limits<double>::infinity();
        total += eps(t) * eps(t);
    }
    if (residuals_out) *residuals_out = eps;
    return total;
}

// Deterministic Nelder-Mead on the CSS surface.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                            Eigen::VectorXd x0, int max_iter = 500, double ftol = 1e-12) {
    const int d = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> pts(d + 1, x0);
    std::vector<double> vals(d + 1);
    for (int i = 0; i < d; ++i)
        pts[i + 1](i) += x0(i) != 0.0 ? 0.05 * std::fabs(x0(i)) + 0.01 : 0.05;
    for (int i = 0; i <= d; ++i) vals[i] = f(pts[i]);

    for (int iter = 0; iter < max_iter; ++iter) {
        // order the simplex
        std::vector<int> order(d + 1);
        for (int i = 0; i <= d; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        std::vector<Eigen::VectorXd> spts(d + 1);
        std::vector<double> svals(d + 1);
        for (int i = 0; i <= d; ++i) { spts[i] = pts[order[i]]; svals[i] = vals[order[i]]; }
        pts = spts; vals = svals;

        if (std::fabs(vals[d] - vals[0]) <= ftol * (std::fabs(vals[0]) + 1e-30)) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < d; ++i) centroid += pts[i];
        centroid /= d;

        Eigen::VectorXd refl = centroid + (centroid - pts[d]);
        double frefl = f(refl);
        if (frefl < vals[0]) {
            Eigen::VectorXd expd = centroid + 2.0 * (centroid - pts[d]);
            double fexp = f(expd);
            if (fexp < frefl) { pts[d] = expd; vals[d] = fexp; }
            else { pts[d] = refl; vals[d] = frefl; }
        } else if (frefl < vals[d - 1]) {
            pts[d] = refl; vals[d] = frefl;
        } else {
            Eigen::VectorXd contr = centroid + 0.5 * (pts[d] - centroid);
            double fcon = f(contr);
            if (fcon < vals[d]) { pts[d] = contr; vals[d] = fcon; }
            else {
                for (int i = 1; i <= d; ++i) {
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= d; ++i)
        if (vals[i] < vals[best]) best = i;
    return pts[best];
}

// Long-AR residuals for the Hannan-Rissanen start values.
Eigen::VectorXd long_ar_residuals(const Eigen::VectorXd& y, int order) {
    const int n = static_cast<int>(y.size());
    const int rows = n - order;
    Eigen::MatrixXd x(rows, order + 1);
    Eigen::VectorXd target(rows);
    for (int t = 0; t < rows; ++t) {
        x(t, 0) = 1.0;
        for (int i = 0; i < order; ++i) x(t, 1 + i) = y(order + t - 1 - i);
        target(t) = y(order + t);
    }
    const OlsResult fit = ols_solve(x, target);
    Eigen::VectorXd eps = Eigen::VectorXd::Zero(n);
    eps.tail(rows) = fit.residuals;
    return eps;
}

}  // namespace

double ArmaModel::mean() const {
    const double denom = 1.0 - ar.sum();
    return std::fabs(denom) > 1e-12 ? intercept / denom : intercept;
}

ArmaModel fit_arma_fixed(const Eigen::VectorXd& y_in, int p, int q, int condition_on) {
    const int n = static_cast<int>(y_in.size());
    const int start = condition_on >= std::max(p, q) ? condition_on : std::max(p, q);
    if (n - start < 10) throw TooShortError("fit_arma_fixed: too few usable observations");

    // Fit on a unit-variance scale: the optimizer's step sizes become
    // meaningful and the AIC ranking is invariant to rescaled inputs.
    const double y_mean = y_in.mean();
    const double scale = std::max(std::sqrt((y_in.array() - y_mean).square().sum() / n), 1e-300);
    const Eigen::VectorXd y = y_in / scale;

    Eigen::VectorXd params = Eigen::VectorXd::Zero(1 + p + q);

    if (q == 0) {
        // pure AR: CSS minimizer is plain least squares
        const int rows = n - start;
        Eigen::MatrixXd x(rows, p + 1);
        Eigen::VectorXd target(rows);
        for (int t = 0; t < rows; ++t) {
            x(t, 0) = 1.0;
            for (int i = 0; i < p; ++i) x(t, 1 + i) = y(start + t - 1 - i);
            target(t) = y(start + t);
        }
        params = ols_solve(x, target).beta;
    } else {
        const int long_order = std::min(std::max(p + q, 6), n / 4);
        const Eigen::VectorXd eps = long_ar_residuals(y, long_order);
        const int base = std::max(long_order, std::max(p, q));
        const int rows = n - base;
        Eigen::MatrixXd x(rows, 1 + p + q);
        Eigen::VectorXd target(rows);
        for (int t = 0; t < rows; ++t) {
            x(t, 0) = 1.0;
            for (int i = 0; i < p; ++i) x(t, 1 + i) = y(base + t - 1 - i);
            for (int j = 0; j < q; ++j) x(t, 1 + p + j) = eps(base + t - 1 - j);
            target(t) = y(base + t);
        }
        params = ols_solve(x, target).beta;

        auto objective = [&](const Eigen::VectorXd& v) { return css(y, v, p, q, start); };
        params = nelder_mead(objective, params);
    }

    ArmaModel model;
    model.p = p;
    model.q = q;
    model.intercept = params(0) * scale;
    model.ar = params.segment(1, p);
    model.ma = params.segment(1 + p, q);
    model.n_used = n - start;
    model.conditioned_on = start;

    const double rss = css(y, params, p, q, start) * scale * scale;
    model.sigma2 = rss / model.n_used;
    model.aic = model.n_used * std::log(std::max(model.sigma2, 1e-300)) + 2.0 * (p + q + 1);

    if (companion_radius(model.ar) >= 1.0 - 1e-6)
        throw RuntimeFailure("fit_arma_fixed: AR roots not outside the unit circle");
    if (companion_radius(model.ma) >= 1.0 - 1e-6)
        throw RuntimeFailure("fit_arma_fixed: MA roots not outside the unit circle");
    return model;
}

ArmaModel fit_arma(const Eigen::VectorXd& y, const ArmaFitOptions& options) {
    const int n = static_cast<int>(y.size());
    if (n < 20 + options.max_p + options.max_q)
        throw TooShortError("fit_arma: series shorter than 20 + max_p + max_q");

    const double mean = y.mean();
    const double var = (y.array() - mean).square().sum() / n;
    if (var < 1e-20) throw AllCandidatesFailedError("fit_arma: zero-variance series");

    ArmaModel best;
    bool have_best = false;
    std::string skipped;
    for (int p = 0; p <= options.max_p; ++p) {
        for (int q = 0; q <= options.max_q; ++q) {
            try {
                ArmaModel candidate = fit_arma_fixed(y, p, q, options.max_p);
                if (!have_best || candidate.aic < best.aic) {
                    best = candidate;
                    have_best = true;
                }
            } catch (const std::exception&) {
                skipped += "(" + std::to_string(p) + "," + std::to_string(q) + ") ";
            }
        }
    }
    if (!have_best) throw AllCandidatesFailedError("fit_arma: every candidate failed");
    if (!skipped.empty()) best.note = "skipped: " + skipped;
    return best;
}

Eigen::VectorXd arma_residuals(const ArmaModel& model, const Eigen::VectorXd& y) {
    Eigen::VectorXd params(1 + model.p + model.q);
    params(0) = model.intercept;
    params.segment(1, model.p) = model.ar;
    params.segment(1 + model.p, model.q) = model.ma;
    Eigen::VectorXd eps;
    // replay with the exact conditioning the fit used: near-boundary MA
    // recursions are transient-sensitive and a mismatched start can diverge
    const int start = std::max(model.conditioned_on, std::max(model.p, model.q));
    css(y, params, model.p, model.q, start, &eps);
    return eps;
}

Eigen::VectorXd forecast_arma(const ArmaModel& model, const Eigen::VectorXd& y, int h) {
    if (h < 1) throw HorizonZeroError("forecast horizon must be positive");
    const int n = static_cast<int>(y.size());
    const Eigen::VectorXd eps = arma_residuals(model, y);

    Eigen::VectorXd out(h);
    std::vector<double> history(y.data(), y.data() + n);
    for (int step = 1; step <= h; ++step) {
        const int t = n + step - 1;
        double pred = model.intercept;
        for (int i = 0; i < model.p; ++i) pred += model.ar(i) * history[t - 1 - i];
        for (int j = 0; j < model.q; ++j) {
            const int idx = t - 1 - j;
            if (idx < n) pred += model.ma(j) * eps(idx);  // future shocks have mean zero
        }
        history.push_back(pred);
        out(step - 1) = pred;
    }
    return out;
}

}  // namespace sparsecast
