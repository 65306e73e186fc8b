#include "sparsecast/factor_models.hpp"

#include <cmath>

#include "sparsecast/errors.hpp"
#include "sparsecast/lasso.hpp"
#include "sparsecast/stats_util.hpp"

namespace sparsecast {

namespace {

std::vector<ColumnMeta> default_columns(int q) {
    std::vector<ColumnMeta> cols(q);
    for (int j = 0; j < q; ++j) cols[j] = ColumnMeta{"sel" + std::to_string(j), 0};
    return cols;
}

Eigen::MatrixXd standardized_block(const Eigen::MatrixXd& raw, const PcaRotation& rot) {
    Eigen::MatrixXd z(raw.rows(), raw.cols());
    for (int j = 0; j < raw.cols(); ++j)
        z.col(j) = (raw.col(j).array() - rot.centering(j)) / rot.scaling(j);
    return z;
}

std::vector<int> keep_components(const PcaRotation& rot, double drop_ratio) {
    const double total = rot.component_variances.sum();
    std::vector<int> kept;
    for (int j = 0; j < rot.size(); ++j)
        if (rot.component_variances(j) >= drop_ratio * total) kept.push_back(j);
    if (kept.empty()) kept.push_back(0);
    return kept;
}

}  // namespace

double FactorModel::predict_raw(const Eigen::VectorXd& raw_row) const {
    if (raw_row.size() != rotation.size())
        throw DimensionMismatchError("FactorModel::predict_raw: row length != q");
    Eigen::VectorXd z = ((raw_row - rotation.centering).array() / rotation.scaling.array()).matrix();
    double value = target_mean + z.dot(mapped_coefficients);
    if (original_coefficients.size() == z.size()) value += z.dot(original_coefficients);
    return value;
}

Eigen::VectorXd FactorModel::fitted(const Eigen::MatrixXd& standardized_rows) const {
    Eigen::VectorXd out =
        (standardized_rows * mapped_coefficients).array() + target_mean;
    if (original_coefficients.size() == standardized_rows.cols())
        out += standardized_rows * original_coefficients;
    return out;
}

std::vector<ColumnMeta> FactorModel::active_columns() const {
    const bool any_active = !active_factor_block.empty() || !active_original_block.empty() ||
                            factor_coefficients.cwiseAbs().sum() > 0.0;
    return any_active ? selected_columns : std::vector<ColumnMeta>{};
}

FactorModel pca_lasso(const Eigen::MatrixXd& x_selected_raw, const Eigen::VectorXd& target,
                      double lambda, std::vector<ColumnMeta> columns,
                      const FactorLassoOptions& options) {
    const int n = static_cast<int>(x_selected_raw.rows());
    const int q = static_cast<int>(x_selected_raw.cols());
    if (target.size() != n) throw DimensionMismatchError("pca_lasso: target length != n");

    FactorModel model;
    model.mode = FactorMode::PcaLasso;
    model.rotation = fit_pca(x_selected_raw);
    model.selected_columns = columns.empty() ? default_columns(q) : std::move(columns);
    model.target_mean = target.mean();
    model.lambda = lambda;

    const Eigen::MatrixXd z = standardized_block(x_selected_raw, model.rotation);
    model.kept_components = keep_components(model.rotation, options.variance_drop_ratio);
    const int m = static_cast<int>(model.kept_components.size());

    Eigen::MatrixXd factors(n, m);
    Eigen::VectorXd scale(m);
    for (int i = 0; i < m; ++i) {
        factors.col(i) = z * model.rotation.loadings.col(model.kept_components[i]);
        scale(i) = std::sqrt(factors.col(i).squaredNorm() / n);
        if (scale(i) <= 0.0) scale(i) = 1.0;
        factors.col(i) /= scale(i);
    }

    const Eigen::VectorXd y = target.array() - model.target_mean;
    const Eigen::VectorXd beta_std = coordinate_descent(factors, y, lambda);

    model.factor_coefficients = beta_std.array() / scale.array();
    model.mapped_coefficients = Eigen::VectorXd::Zero(q);
    for (int i = 0; i < m; ++i) {
        model.mapped_coefficients +=
            model.rotation.loadings.col(model.kept_components[i]) * model.factor_coefficients(i);
        if (beta_std(i) != 0.0) model.active_factor_block.push_back(model.kept_components[i]);
    }
    return model;
}

FactorModel adapcax(const Eigen::MatrixXd& x_selected_raw, const Eigen::VectorXd& target,
                    double lambda, std::vector<ColumnMeta> columns,
                    const FactorLassoOptions& options) {
    const int n = static_cast<int>(x_selected_raw.rows());
    const int q = static_cast<int>(x_selected_raw.cols());
    if (target.size() != n) throw DimensionMismatchError("adapcax: target length != n");
    if (options.exclude_factor_block && options.exclude_original_block)
        throw ValidationError("adapcax: both blocks excluded");

    FactorModel model;
    model.mode = FactorMode::AdaPcaX;
    model.rotation = fit_pca(x_selected_raw);
    model.selected_columns = columns.empty() ? default_columns(q) : std::move(columns);
    model.target_mean = target.mean();
    model.lambda = lambda;

    const Eigen::MatrixXd z = standardized_block(x_selected_raw, model.rotation);
    model.kept_components = keep_components(model.rotation, options.variance_drop_ratio);
    const int m = static_cast<int>(model.kept_components.size());

    const int n_factor = options.exclude_factor_block ? 0 : m;
    const int n_orig = options.exclude_original_block ? 0 : q;

    // Augmented design [F | X], each column standardized (joint standardization).
    Eigen::MatrixXd aug(n, n_factor + n_orig);
    Eigen::VectorXd scale(n_factor + n_orig);
    for (int i = 0; i < n_factor; ++i) {
        aug.col(i) = z * model.rotation.loadings.col(model.kept_components[i]);
        scale(i) = std::sqrt(aug.col(i).squaredNorm() / n);
        if (scale(i) <= 0.0) scale(i) = 1.0;
        aug.col(i) /= scale(i);
    }
    for (int j = 0; j < n_orig; ++j) {
        const int c = n_factor + j;
        aug.col(c) = z.col(j);
        scale(c) = std::sqrt(aug.col(c).squaredNorm() / n);
        if (scale(c) <= 0.0) scale(c) = 1.0;
        aug.col(c) /= scale(c);
    }

    const Eigen::VectorXd y = target.array() - model.target_mean;
    const Eigen::VectorXd beta_std = coordinate_descent(aug, y, lambda);

    model.factor_coefficients = Eigen::VectorXd::Zero(m);
    model.mapped_coefficients = Eigen::VectorXd::Zero(q);
    for (int i = 0; i < n_factor; ++i) {
        model.factor_coefficients(i) = beta_std(i) / scale(i);
        model.mapped_coefficients +=
            model.rotation.loadings.col(model.kept_components[i]) * model.factor_coefficients(i);
        if (beta_std(i) != 0.0) model.active_factor_block.push_back(model.kept_components[i]);
    }
    model.original_coefficients = Eigen::VectorXd::Zero(q);
    for (int j = 0; j < n_orig; ++j) {
        const int c = n_factor + j;
        model.original_coefficients(j) = beta_std(c) / scale(c);
        if (beta_std(c) != 0.0) model.active_original_block.push_back(j);
    }
    return model;
}

namespace {

Eigen::MatrixXd standardized_factor_design(const Eigen::MatrixXd& x_raw,
                                           const FactorLassoOptions& options, bool augmented) {
    const PcaRotation rot = fit_pca(x_raw);
    const Eigen::MatrixXd z = standardized_block(x_raw, rot);
    const std::vector<int> kept = keep_components(rot, options.variance_drop_ratio);
    const int n = static_cast<int>(x_raw.rows());
    const int m = static_cast<int>(kept.size());
    const int extra = augmented ? static_cast<int>(x_raw.cols()) : 0;

    Eigen::MatrixXd design(n, m + extra);
    for (int i = 0; i < m; ++i) {
        design.col(i) = z * rot.loadings.col(kept[i]);
        const double sd = std::sqrt(design.col(i).squaredNorm() / n);
        if (sd > 0.0) design.col(i) /= sd;
    }
    for (int j = 0; j < extra; ++j) {
        design.col(m + j) = z.col(j);
        const double sd = std::sqrt(design.col(m + j).squaredNorm() / n);
        if (sd > 0.0) design.col(m + j) /= sd;
    }
    return design;
}

}  // namespace

double pca_lasso_lambda_max(const Eigen::MatrixXd& x_selected_raw, const Eigen::VectorXd& target,
                            const FactorLassoOptions& options) {
    const Eigen::MatrixXd design = standardized_factor_design(x_selected_raw, options, false);
    const Eigen::VectorXd y = target.array() - target.mean();
    return lambda_max(design, y);
}

double adapcax_lambda_max(const Eigen::MatrixXd& x_selected_raw, const Eigen::VectorXd& target,
                          const FactorLassoOptions& options) {
    const Eigen::MatrixXd design = standardized_factor_design(x_selected_raw, options, true);
    const Eigen::VectorXd y = target.array() - target.mean();
    return lambda_max(design, y);
}

PostLassoForecast post_lasso_factor_model(const Eigen::MatrixXd& x_selected_raw,
                                          const Eigen::VectorXd& target, int k,
                                          PostLassoForecastMode mode, int horizon,
                                          const ArmaFitOptions& arma_options) {
    const int n = static_cast<int>(x_selected_raw.rows());
    const int q = static_cast<int>(x_selected_raw.cols());
    if (k < 1 || k > q) throw ValidationError("post_lasso_factor_model: k must lie in [1, q]");
    if (k >= n) throw ValidationError("post_lasso_factor_model: k must be < n");
    if (horizon < 0) throw HorizonZeroError("negative horizon");

    PostLassoForecast out;
    out.rotation = fit_pca(x_selected_raw);
    const Eigen::MatrixXd z = standardized_block(x_selected_raw, out.rotation);
    const Eigen::MatrixXd factors = z * out.rotation.loadings;  // n x q, raw factor scale

    Eigen::MatrixXd design(n, 1 + k);
    design.col(0).setOnes();
    design.rightCols(k) = factors.leftCols(k);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0 ||
        (sv(0) / sv(sv.size() - 1)) * (sv(0) / sv(sv.size() - 1)) > 1e12)
        throw RankDeficientError("post_lasso_factor_model: factor OLS is rank deficient");
    out.ols_coefficients = svd.solve(target);

    if (horizon == 0) {
        out.factor_forecasts = factors.row(n - 1).head(k);
        out.forecast = out.ols_coefficients(0) +
                       out.factor_forecasts.dot(out.ols_coefficients.tail(k));
        return out;
    }

    Eigen::VectorXd f_hat(k);
    if (mode == PostLassoForecastMode::Direct) {
        for (int j = 0; j < k; ++j) {
            const Eigen::VectorXd series = factors.col(j);
            const ArmaModel m = fit_arma(series, arma_options);
            f_hat(j) = forecast_arma(m, series, horizon)(horizon - 1);
        }
    } else {
        Eigen::VectorXd x_hat(q);
        for (int i = 0; i < q; ++i) {
            const Eigen::VectorXd series = z.col(i);
            const ArmaModel m = fit_arma(series, arma_options);
            x_hat(i) = forecast_arma(m, series, horizon)(horizon - 1);
        }
        const Eigen::VectorXd all = factor_forecast_aggregate(x_hat, out.rotation);
        f_hat = all.head(k);
    }

    out.factor_forecasts = f_hat;
    out.forecast = out.ols_coefficients(0) + f_hat.dot(out.ols_coefficients.tail(k));
    return out;
}

}  // namespace sparsecast
