#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sparsecast {

/// Identifies where a regressor column came from: a series and a quarterly lag.
struct ColumnMeta {
    std::string series_id;
    int lag = 0;

    bool operator==(const ColumnMeta&) const = default;
};

/// Standardized regressor block with the parameters that were applied, so
/// coefficients can be mapped back to the original scale.
///
/// Convention: population (1/n) standard deviation, matching the 1/(2n)
/// objective scaling used by the solvers.
class DesignMatrix {
public:
    /// Center/scale every column and center the target.
    /// If `tolerate_constant` is set, a constant column is zeroed out instead
    /// of throwing (used inside validation folds where a short training slice
    /// can degenerate); its recorded sd is 1 so de-standardization stays safe.
    static DesignMatrix standardize(const Eigen::MatrixXd& raw, const Eigen::VectorXd& target,
                                    std::vector<ColumnMeta> columns = {},
                                    bool tolerate_constant = false);

    int rows() const { return static_cast<int>(values_.rows()); }
    int cols() const { return static_cast<int>(values_.cols()); }

    const Eigen::MatrixXd& values() const { return values_; }
    const Eigen::VectorXd& target() const { return target_; }
    const std::vector<ColumnMeta>& columns() const { return columns_; }
    const Eigen::VectorXd& column_means() const { return col_mean_; }
    const Eigen::VectorXd& column_sds() const { return col_sd_; }
    double target_mean() const { return target_mean_; }

    /// Reconstruct the raw (pre-standardization) regressor block.
    Eigen::MatrixXd raw_values() const;
    /// Reconstruct the raw target.
    Eigen::VectorXd raw_target() const;

    /// Standardize an out-of-sample raw row with the stored parameters.
    Eigen::VectorXd standardize_row(const Eigen::VectorXd& raw_row) const;

    /// Row subset (used by expanding-origin validation), re-standardized from
    /// the reconstructed raw slice.
    DesignMatrix head(int n_rows, bool tolerate_constant = true) const;

private:
    Eigen::MatrixXd values_;
    std::vector<ColumnMeta> columns_;
    Eigen::VectorXd target_;
    Eigen::VectorXd col_mean_;
    Eigen::VectorXd col_sd_;
    double target_mean_ = 0.0;
};

}  // namespace sparsecast
