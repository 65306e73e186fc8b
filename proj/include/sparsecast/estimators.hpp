#pragma once

#include <optional>
#include <vector>

#include "sparsecast/lasso.hpp"

namespace sparsecast {

enum class WeightSource { Ridge, Ols, Lasso, UserSupplied };

/// Per-column adaptive penalties w_j = 1/|b*_j|^gamma. A pilot coefficient of
/// exactly zero means an infinite weight; those columns are listed in
/// `excluded` and never enter the model.
struct AdaptiveWeights {
    Eigen::VectorXd weights;    // strictly positive, finite; 1.0 on excluded columns
    std::vector<int> excluded;  // columns dropped outright
    double gamma = 1.0;
    WeightSource source = WeightSource::Ridge;
};

/// Unpenalized least squares on a column subset; zeros elsewhere.
LassoFit ols(const DesignMatrix& x, const std::vector<int>& subset);

/// Ridge under the canonical scaling: b = (X'X + n*lambda*I)^-1 X'y.
/// Solved through the p-size normal equations when p <= n and through the
/// n-size kernel system otherwise.
LassoFit ridge(const DesignMatrix& x, double lambda);

AdaptiveWeights adaptive_weights(const DesignMatrix& x, double gamma, WeightSource source,
                                 int cv_holdout = 16);

/// Weighted LASSO via the column-rescaling reduction: solve the ordinary
/// LASSO on X * W^-1, map back b_j = b~_j / w_j.
LassoFit adaptive_lasso(const DesignMatrix& x, const AdaptiveWeights& weights, double lambda,
                        const CdOptions& options = {});
LassoFit adaptive_lasso(const DesignMatrix& x, double gamma, WeightSource source, double lambda);

/// Two stages: LASSO selection at lambda, then LASSO on the selected set at
/// phi*lambda. Coefficients outside the stage-1 active set are exactly zero.
LassoFit relaxed_lasso(const DesignMatrix& x, double lambda, double phi,
                       const CdOptions& options = {});

/// Square-root LASSO: minimizes sqrt(RSS/n) + lambda ||b||_1, solved by
/// alternating the scale estimate and a LASSO solve at lambda*sigma until the
/// scale is a fixed point (1e-8 relative). Default lambda = sqrt(2 log(p)/n).
LassoFit sqrt_lasso(const DesignMatrix& x, std::optional<double> lambda = std::nullopt,
                    const CdOptions& options = {});

/// Largest lambda whose active set has exactly k columns, located by bisection
/// against the path. When cardinality jumps past k the closest fit with
/// cardinality >= k is returned with `approximate_cardinality` set.
LassoFit path_at_cardinality(const DesignMatrix& x, int k, Variant variant = Variant::Lasso,
                             const AdaptiveWeights* weights = nullptr);

}  // namespace sparsecast
