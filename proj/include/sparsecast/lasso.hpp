#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sparsecast/design_matrix.hpp"

namespace sparsecast {

enum class Variant { Lasso, SqrtLasso, Adaptive, Relaxed, PcaLasso, AdaPcaX, Ols, Ridge };

const char* variant_name(Variant v);

/// One penalized fit. Coefficients are reported on the original
/// (de-standardized) scale; the standardized-scale vector is kept alongside
/// because identities and KKT certificates live there.
struct LassoFit {
    Eigen::VectorXd coefficients;      // original scale, length p
    Eigen::VectorXd std_coefficients;  // standardized scale, length p
    double intercept = 0.0;
    std::vector<int> active_set;       // indices with nonzero coefficient
    double lambda = 0.0;
    double objective_value = 0.0;
    Variant variant = Variant::Lasso;

    // Degenerate outcomes are flagged rather than thrown.
    bool empty_active_set = false;
    bool zero_residual = false;
    bool approximate_cardinality = false;

    double predict_raw(const Eigen::VectorXd& raw_row) const {
        return intercept + raw_row.dot(coefficients);
    }
};

struct LassoPath {
    std::vector<double> lambdas;   // strictly decreasing
    std::vector<LassoFit> fits;    // aligned with lambdas
    std::vector<int> n_active;
};

/// sign(rho) * max(|rho| - lambda, 0)
double soft_threshold(double rho, double lambda);

struct CdOptions {
    double tol = 1e-9;          // max coefficient change per sweep, standardized scale
    long max_sweeps = 100000;
    Eigen::VectorXd penalty_scale;  // per-column multipliers on lambda; empty = all ones
    Eigen::VectorXd warm_start;     // empty = zeros
};

/// Cyclic coordinate descent for
///     (1/2n) ||y - X beta||^2 + lambda * sum_j penalty_scale_j |beta_j|
/// on an arbitrary centered matrix (columns need not have unit norm).
/// Throws NoConvergenceError when the sweep cap is hit.
Eigen::VectorXd coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   double lambda, const CdOptions& options = {});

/// Smallest lambda at which all coefficients are zero under the canonical
/// objective: max_j |x_j' y| / (n * penalty_scale_j).
double lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& penalty_scale = {});

/// Log-spaced grid from lambda_max down to ratio*lambda_max.
std::vector<double> default_lambda_grid(double lambda_max_value, int count = 100,
                                        double ratio = 1e-3);

/// Solve the canonical LASSO at one lambda on a standardized design.
LassoFit lasso_fit(const DesignMatrix& x, double lambda, const CdOptions& options = {});

/// Warm-started path over the grid (generated when omitted).
LassoPath lasso_path(const DesignMatrix& x, std::optional<std::vector<double>> lambdas = std::nullopt,
                     const CdOptions& options = {});

/// Stationarity certificate for a fit of the canonical objective:
/// |x_j'(y - X b)/n| <= lambda*w_j + tol off-support and = lambda*w_j*sign(b_j)
/// within tol on-support. Returns the largest violation.
double kkt_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta, double lambda,
                     const Eigen::VectorXd& penalty_scale = {});

namespace detail {

/// Build a LassoFit from standardized-scale coefficients of `x`.
LassoFit make_fit(const DesignMatrix& x, const Eigen::VectorXd& std_beta, double lambda,
                  Variant variant);

}  // namespace detail

}  // namespace sparsecast
