#pragma once

#include <vector>

#include "sparsecast/arma.hpp"
#include "sparsecast/design_matrix.hpp"
#include "sparsecast/pca.hpp"

namespace sparsecast {

enum class FactorMode { PcaLasso, AdaPcaX, PostLassoOls };

/// LASSO in factor space over a pre-selected regressor block, with the
/// coefficients mapped back through the loading matrix. Standardization of the
/// block is recomputed here so the model is self-contained.
struct FactorModel {
    PcaRotation rotation;
    std::vector<ColumnMeta> selected_columns;
    std::vector<int> kept_components;     // after dropping near-zero-variance ones
    Eigen::VectorXd factor_coefficients;  // on the raw factor scale, length = kept
    Eigen::VectorXd mapped_coefficients;  // = L_kept * factor_coefficients, standardized X scale
    FactorMode mode = FactorMode::PcaLasso;
    double target_mean = 0.0;
    double lambda = 0.0;

    // AdaPcaX extras: the augmented problem's coefficients split into blocks.
    Eigen::VectorXd original_coefficients;  // standardized X scale, zero block otherwise
    std::vector<int> active_factor_block;
    std::vector<int> active_original_block;

    /// Predict from a raw (unstandardized) selected-variable row.
    double predict_raw(const Eigen::VectorXd& raw_row) const;

    /// Predict from standardized rows, through factor space.
    Eigen::VectorXd fitted(const Eigen::MatrixXd& standardized_rows) const;

    /// Active selected columns (for selection-frequency tracking).
    std::vector<ColumnMeta> active_columns() const;
};

struct FactorLassoOptions {
    double variance_drop_ratio = 1e-10;  // components below ratio*total are removed
    bool exclude_factor_block = false;   // AdaPcaX block toggles (testing/nesting)
    bool exclude_original_block = false;
};

/// LASSO on the principal components of the selected block.
FactorModel pca_lasso(const Eigen::MatrixXd& x_selected_raw, const Eigen::VectorXd& target,
                      double lambda, std::vector<ColumnMeta> columns = {},
                      const FactorLassoOptions& options = {});

/// LASSO on the augmentation [factors | originals], jointly standardized.
FactorModel adapcax(const Eigen::MatrixXd& x_selected_raw, const Eigen::VectorXd& target,
                    double lambda, std::vector<ColumnMeta> columns = {},
                    const FactorLassoOptions& options = {});

/// Largest useful penalty of the (standardized) factor problem each model
/// solves; validation grids for the second stage start here.
double pca_lasso_lambda_max(const Eigen::MatrixXd& x_selected_raw, const Eigen::VectorXd& target,
                            const FactorLassoOptions& options = {});
double adapcax_lambda_max(const Eigen::MatrixXd& x_selected_raw, const Eigen::VectorXd& target,
                          const FactorLassoOptions& options = {});

enum class PostLassoForecastMode { Direct, Aggregated };

struct PostLassoForecast {
    double forecast = 0.0;
    Eigen::VectorXd ols_coefficients;  // intercept first, then k component loadings
    Eigen::VectorXd factor_forecasts;  // the k factor values used
    PcaRotation rotation;
};

/// Post-LASSO factor OLS: regress the target on the first k principal
/// components of the selected block, then forecast the components h steps
/// ahead either directly (per-component ARMA) or by aggregating per-variable
/// ARMA forecasts through the rotation. h = 0 returns the fitted value at the
/// last observation, identical for both modes.
PostLassoForecast post_lasso_factor_model(const Eigen::MatrixXd& x_selected_raw,
                                          const Eigen::VectorXd& target, int k,
                                          PostLassoForecastMode mode, int horizon,
                                          const ArmaFitOptions& arma_options = {});

}  // namespace sparsecast
