#pragma once

#include <Eigen/Dense>

namespace sparsecast {

/// Principal-component rotation of a standardized block, with the
/// centering/scaling actually applied kept alongside so out-of-sample rows and
/// variable forecasts can be pushed through the same map.
struct PcaRotation {
    Eigen::MatrixXd loadings;             // q x q orthogonal, columns = components
    Eigen::VectorXd component_variances;  // nonincreasing
    Eigen::VectorXd centering;            // applied to raw columns before rotation
    Eigen::VectorXd scaling;

    int size() const { return static_cast<int>(loadings.rows()); }

    /// Factor scores for already-standardized rows: F = X L.
    Eigen::MatrixXd scores(const Eigen::MatrixXd& standardized) const {
        return standardized * loadings;
    }
};

/// Eigendecomposition of the sample covariance (population 1/n convention).
/// Columns are standardized internally and the applied parameters recorded.
/// Loading signs are fixed so each column's largest-magnitude entry is
/// positive, which makes repeated runs bitwise stable.
PcaRotation fit_pca(const Eigen::MatrixXd& x_selected);

/// Rotate a vector of per-variable forecasts (already standardized with the
/// rotation's stored centering/scaling) into factor space: F_hat = L' x_hat.
Eigen::VectorXd factor_forecast_aggregate(const Eigen::VectorXd& x_hat_future,
                                          const PcaRotation& rotation);

}  // namespace sparsecast
