#include "sparsecast/estimators.hpp"

#include <cmath>

#include "sparsecast/cross_validation.hpp"
#include "sparsecast/errors.hpp"

namespace sparsecast {

LassoFit ols(const DesignMatrix& x, const std::vector<int>& subset) {
    const int n = x.rows();
    const int m = static_cast<int>(subset.size());
    if (m >= n) throw InsufficientDataError("ols subset as large as sample");

    Eigen::MatrixXd sub(n, m);
    for (int i = 0; i < m; ++i) sub.col(i) = x.values().col(subset[i]);

    LassoFit fit;
    Eigen::VectorXd beta_sub = Eigen::VectorXd::Zero(m);
    if (m > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double smax = sv(0);
        const double smin = sv(sv.size() - 1);
        // condition number of the normal equations = (smax/smin)^2
        if (smin <= 0.0 || (smax / smin) * (smax / smin) > 1e12)
            throw RankDeficientError("ols: normal equations condition number exceeds 1e12");
        beta_sub = svd.solve(x.target());
    }

    Eigen::VectorXd std_beta = Eigen::VectorXd::Zero(x.cols());
    for (int i = 0; i < m; ++i) std_beta(subset[i]) = beta_sub(i);

    fit = detail::make_fit(x, std_beta, 0.0, Variant::Ols);
    fit.objective_value = (x.target() - x.values() * std_beta).squaredNorm() / (2.0 * n);
    return fit;
}

LassoFit ridge(const DesignMatrix& x, double lambda) {
    if (lambda <= 0.0) throw ValidationError("ridge lambda must be positive");
    if (!x.values().allFinite() || !x.target().allFinite())
        throw NonFiniteInputError("ridge: non-finite input");

    const int n = x.rows();
    const int p = x.cols();
    Eigen::VectorXd std_beta;
    if (p <= n) {
        Eigen::MatrixXd gram = x.values().transpose() * x.values();
        gram.diagonal().array() += n * lambda;
        std_beta = gram.ldlt().solve(x.values().transpose() * x.target());
    } else {
        // kernel form: b = X'(XX' + n*lambda*I)^-1 y
        Eigen::MatrixXd kernel = x.values() * x.values().transpose();
        kernel.diagonal().array() += n * lambda;
        std_beta = x.values().transpose() * kernel.ldlt().solve(x.target());
    }

    LassoFit fit = detail::make_fit(x, std_beta, lambda, Variant::Ridge);
    fit.objective_value = (x.target() - x.values() * std_beta).squaredNorm() / (2.0 * n) +
                          0.5 * lambda * std_beta.squaredNorm();
    return fit;
}

AdaptiveWeights adaptive_weights(const DesignMatrix& x, double gamma, WeightSource source,
                                 int cv_holdout) {
    if (gamma <= 0.0) throw ValidationError("adaptive gamma must be positive");

    Eigen::VectorXd pilot;
    switch (source) {
        case WeightSource::Ridge: {
            const double lr = cv_ridge_lambda(x, {}, cv_holdout);
            pilot = ridge(x, lr).std_coefficients;
            break;
        }
        case WeightSource::Ols: {
            std::vector<int> all(x.cols());
            for (int j = 0; j < x.cols(); ++j) all[j] = j;
            pilot = ols(x, all).std_coefficients;
            break;
        }
        case WeightSource::Lasso: {
            HyperGrids grids;
            grids.holdout = cv_holdout;
            const auto chosen = cross_validate(x, Variant::Lasso, grids);
            pilot = lasso_fit(x, chosen.lambda).std_coefficients;
            break;
        }
        case WeightSource::UserSupplied:
            throw ValidationError("user-supplied weights are passed directly, not estimated");
    }

    AdaptiveWeights w;
    w.gamma = gamma;
    w.source = source;
    w.weights = Eigen::VectorXd::Ones(x.cols());
    for (int j = 0; j < x.cols(); ++j) {
        if (pilot(j) == 0.0) {
            w.excluded.push_back(j);  // infinite weight
        } else {
            w.weights(j) = 1.0 / std::pow(std::fabs(pilot(j)), gamma);
        }
    }
    return w;
}

LassoFit adaptive_lasso(const DesignMatrix& x, const AdaptiveWeights& weights, double lambda,
                        const CdOptions& options) {
    const int p = x.cols();
    if (weights.weights.size() != p) throw DimensionMismatchError("weights length != p");

    std::vector<bool> excluded(p, false);
    for (int j : weights.excluded) excluded[j] = true;

    // Eq-style reduction: rescale kept columns by 1/w_j, ordinary LASSO, map back.
    std::vector<int> kept;
    kept.reserve(p);
    for (int j = 0; j < p; ++j)
        if (!excluded[j]) kept.push_back(j);

    Eigen::MatrixXd scaled(x.rows(), kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i)
        scaled.col(i) = x.values().col(kept[i]) / weights.weights(kept[i]);

    CdOptions step = options;
    step.penalty_scale.resize(0);
    if (options.warm_start.size() == p) {
        step.warm_start.resize(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i)
            step.warm_start(i) = options.warm_start(kept[i]) * weights.weights(kept[i]);
    }
    Eigen::VectorXd beta_scaled = coordinate_descent(scaled, x.target(), lambda, step);

    Eigen::VectorXd std_beta = Eigen::VectorXd::Zero(p);
    for (std::size_t i = 0; i < kept.size(); ++i)
        std_beta(kept[i]) = beta_scaled(i) / weights.weights(kept[i]);

    LassoFit fit = detail::make_fit(x, std_beta, lambda, Variant::Adaptive);
    fit.objective_value = (x.target() - x.values() * std_beta).squaredNorm() / (2.0 * x.rows()) +
                          lambda * beta_scaled.cwiseAbs().sum();
    return fit;
}

LassoFit adaptive_lasso(const DesignMatrix& x, double gamma, WeightSource source, double lambda) {
    return adaptive_lasso(x, adaptive_weights(x, gamma, source), lambda);
}

LassoFit relaxed_lasso(const DesignMatrix& x, double lambda, double phi, const CdOptions& options) {
    if (phi <= 0.0 || phi > 1.0) throw ValidationError("relaxed phi must lie in (0, 1]");

    Eigen::VectorXd stage1 = coordinate_descent(x.values(), x.target(), lambda, options);
    std::vector<int> selected;
    for (int j = 0; j < x.cols(); ++j)
        if (stage1(j) != 0.0) selected.push_back(j);

    if (selected.empty()) {
        LassoFit fit = detail::make_fit(x, Eigen::VectorXd::Zero(x.cols()), lambda, Variant::Relaxed);
        fit.empty_active_set = true;
        return fit;
    }

    Eigen::MatrixXd sub(x.rows(), selected.size());
    Eigen::VectorXd warm(selected.size());
    for (std::size_t i = 0; i < selected.size(); ++i) {
        sub.col(i) = x.values().col(selected[i]);
        warm(i) = stage1(selected[i]);
    }
    CdOptions stage2 = options;
    stage2.penalty_scale.resize(0);
    stage2.warm_start = warm;
    Eigen::VectorXd beta_sub = coordinate_descent(sub, x.target(), phi * lambda, stage2);

    Eigen::VectorXd std_beta = Eigen::VectorXd::Zero(x.cols());
    for (std::size_t i = 0; i < selected.size(); ++i) std_beta(selected[i]) = beta_sub(i);

    LassoFit fit = detail::make_fit(x, std_beta, lambda, Variant::Relaxed);
    fit.objective_value = (x.target() - x.values() * std_beta).squaredNorm() / (2.0 * x.rows()) +
                          phi * lambda * std_beta.cwiseAbs().sum();
    return fit;
}

LassoFit sqrt_lasso(const DesignMatrix& x, std::optional<double> lambda, const CdOptions& options) {
    const int n = x.rows();
    const int p = x.cols();
    const double lam = lambda.value_or(std::sqrt(2.0 * std::log(static_cast<double>(p)) / n));

    double sigma = std::sqrt(x.target().squaredNorm() / n);
    if (sigma <= 0.0) {
        LassoFit fit = detail::make_fit(x, Eigen::VectorXd::Zero(p), lam, Variant::SqrtLasso);
        fit.zero_residual = true;
        return fit;
    }

    CdOptions step = options;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    bool interpolating = false;
    bool converged = false;

    const double sd_y = std::sqrt(x.target().squaredNorm() / n);
    auto scale_map = [&](double s) {
        beta = coordinate_descent(x.values(), x.target(), lam * s, step);
        step.warm_start = beta;
        return std::sqrt((x.target() - x.values() * beta).squaredNorm() / n);
    };

    // Direct iteration first; the map is monotone but active-set changes can
    // make it flap at the tolerance margin, in which case the bracket built
    // along the way hands over to bisection.
    double lo = 0.0, hi = sd_y;
    for (int iter = 0; iter < 40 && !converged && !interpolating; ++iter) {
        const double next = scale_map(sigma);
        if (next < 1e-14 * sd_y) {
            interpolating = true;
            sigma = next;
            break;
        }
        if (next > sigma)
            lo = std::max(lo, sigma);
        else
            hi = std::min(hi, sigma);
        if (std::fabs(next - sigma) <= 1e-8 * sigma) converged = true;
        sigma = next;
    }
    if (!converged && !interpolating) {
        for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (scale_map(mid) > mid)
                lo = mid;
            else
                hi = mid;
        }
        sigma = scale_map(hi);
        converged = hi - lo <= 1e-8 * hi;
    }
    if (!converged && !interpolating) throw NoConvergenceError(lam);

    LassoFit fit = detail::make_fit(x, beta, lam, Variant::SqrtLasso);
    fit.zero_residual = interpolating;
    fit.objective_value = sigma + lam * beta.cwiseAbs().sum();
    return fit;
}

namespace {

int cardinality_at(const DesignMatrix& x, double lambda, const Eigen::MatrixXd& effective,
                   Eigen::VectorXd& warm) {
    CdOptions opt;
    opt.warm_start = warm;
    Eigen::VectorXd beta = coordinate_descent(effective, x.target(), lambda, opt);
    warm = beta;
    int active = 0;
    for (int j = 0; j < beta.size(); ++j)
        if (beta(j) != 0.0) ++active;
    return active;
}

}  // namespace

LassoFit path_at_cardinality(const DesignMatrix& x, int k, Variant variant,
                             const AdaptiveWeights* weights) {
    const int n = x.rows();
    const int p = x.cols();
    if (k < 1 || k >= n) throw ValidationError("cardinality k must satisfy 1 <= k < n");
    if (k > p) throw UnreachableCardinalityError(k);

    // The adaptive variant runs on the rescaled problem; cardinality is
    // unchanged by the rescaling.
    Eigen::MatrixXd effective = x.values();
    if (weights) {
        for (int j = 0; j < p; ++j) effective.col(j) /= weights->weights(j);
        for (int j : weights->excluded) effective.col(j).setZero();
    }

    const double lam_top = lambda_max(effective, x.target());
    if (lam_top <= 0.0) throw UnreachableCardinalityError(k);
    const double lam_floor = lam_top * 1e-8;

    Eigen::VectorXd warm = Eigen::VectorXd::Zero(p);
    if (cardinality_at(x, lam_floor, effective, warm) < k) throw UnreachableCardinalityError(k);

    double hi = lam_top;         // cardinality 0 here
    double lo = lam_floor;       // cardinality >= k here
    warm.setZero();
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = std::sqrt(hi * lo);
        if (cardinality_at(x, mid, effective, warm) >= k)
            lo = mid;
        else
            hi = mid;
        if (hi / lo < 1.0 + 1e-10) break;
    }

    warm.setZero();
    CdOptions opt;
    Eigen::VectorXd beta_eff = coordinate_descent(effective, x.target(), lo, opt);

    Eigen::VectorXd std_beta = beta_eff;
    if (weights) {
        for (int j = 0; j < p; ++j)
            std_beta(j) = weights->weights(j) > 0.0 ? beta_eff(j) / weights->weights(j) : 0.0;
        for (int j : weights->excluded) std_beta(j) = 0.0;
    }

    LassoFit fit = detail::make_fit(x, std_beta, lo, variant);
    fit.approximate_cardinality = static_cast<int>(fit.active_set.size()) != k;
    return fit;
}

}  // namespace sparsecast
