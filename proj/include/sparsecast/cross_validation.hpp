#pragma once

#include <vector>

#include "sparsecast/lasso.hpp"

namespace sparsecast {

struct HyperGrids {
    std::vector<double> lambdas;        // empty = default_lambda_grid from the full sample
    std::vector<double> phis;           // relaxed LASSO second-stage factors
    std::vector<double> ridge_lambdas;  // pilot grid for adaptive weights / ridge
    double gamma = 1.0;
    int holdout = 16;                   // expanding-origin holdout quarters
};

struct ChosenHyperparameters {
    double lambda = 0.0;
    double phi = 1.0;
    double ridge_lambda = 0.0;
    double cv_mse = 0.0;
    Variant variant = Variant::Lasso;
};

/// Expanding-origin time-series validation: each of the last `holdout` rows is
/// predicted from a model fit strictly on the rows before it; hyperparameters
/// minimize mean held-out squared error, ties broken toward the larger lambda
/// (sparser model).
ChosenHyperparameters cross_validate(const DesignMatrix& x, Variant variant,
                                     HyperGrids grids = {});

/// Pilot-ridge lambda by the same expanding-origin scheme.
double cv_ridge_lambda(const DesignMatrix& x, std::vector<double> grid = {}, int holdout = 16);

}  // namespace sparsecast
