#include "sparsecast/cross_validation.hpp"

#include <algorithm>
#include <cmath>

#include "sparsecast/errors.hpp"
#include "sparsecast/estimators.hpp"

namespace sparsecast {

namespace {

std::vector<double> descending(std::vector<double> grid) {
    std::sort(grid.begin(), grid.end(), std::greater<>());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

std::vector<double> default_ridge_grid() {
    return descending(default_lambda_grid(100.0, 13, 1e-6));
}

struct FoldView {
    DesignMatrix train;
    Eigen::VectorXd raw_row;
    double realized = 0.0;
};

std::vector<FoldView> make_folds(const DesignMatrix& x, int holdout) {
    const int n = x.rows();
    if (holdout < 1) throw ValidationError("holdout must be at least 1");
    if (n - holdout < 8)
        throw InsufficientDataError("cross-validation needs at least 8 training rows before the holdout span");

    const Eigen::MatrixXd raw = x.raw_values();
    const Eigen::VectorXd raw_y = x.raw_target();

    std::vector<FoldView> folds;
    folds.reserve(holdout);
    for (int t = n - holdout; t < n; ++t) {
        FoldView fold;
        fold.train = x.head(t);
        fold.raw_row = raw.row(t);
        fold.realized = raw_y(t);
        folds.push_back(std::move(fold));
    }
    return folds;
}

}  // namespace

double cv_ridge_lambda(const DesignMatrix& x, std::vector<double> grid, int holdout) {
    if (grid.empty()) grid = default_ridge_grid();
    grid = descending(std::move(grid));
    holdout = std::min(holdout, x.rows() - 8);
    const auto folds = make_folds(x, holdout);

    std::vector<double> score(grid.size(), 0.0);
    for (const auto& fold : folds) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const LassoFit fit = ridge(fold.train, grid[i]);
            const double err = fit.predict_raw(fold.raw_row) - fold.realized;
            score[i] += err * err;
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (score[i] < score[best]) best = i;  // grid descends, ties keep the larger lambda
    return grid[best];
}

ChosenHyperparameters cross_validate(const DesignMatrix& x, Variant variant, HyperGrids grids) {
    const int n = x.rows();
    const int holdout = std::min(grids.holdout, n - 8);

    // The default validation grid reaches deeper than the path default so a
    // near-noiseless relation can be fit essentially unpenalized; wide designs
    // get a higher floor since coordinate descent stalls near the
    // interpolation regime.
    std::vector<double> lambdas = grids.lambdas.empty()
        ? default_lambda_grid(lambda_max(x.values(), x.target()), 30,
                              x.cols() >= x.rows() ? 1e-2 : 1e-4)
        : descending(grids.lambdas);
    std::vector<double> phis = grids.phis.empty()
        ? std::vector<double>{1.0, 0.7, 0.5, 0.3, 0.1}
        : descending(grids.phis);

    ChosenHyperparameters chosen;
    chosen.variant = variant;

    if (variant == Variant::Ridge) {
        chosen.ridge_lambda = cv_ridge_lambda(x, grids.ridge_lambdas, holdout);
        chosen.lambda = chosen.ridge_lambda;
        return chosen;
    }

    double ridge_lambda = 0.0;
    if (variant == Variant::Adaptive)
        ridge_lambda = cv_ridge_lambda(x, grids.ridge_lambdas, holdout);

    const auto folds = make_folds(x, holdout);

    // score indexed by [lambda][phi]; phi only meaningful for the relaxed variant
    const std::size_t n_phi = variant == Variant::Relaxed ? phis.size() : 1;
    std::vector<std::vector<double>> score(lambdas.size(), std::vector<double>(n_phi, 0.0));
    std::vector<std::vector<double>> score_sq(lambdas.size(), std::vector<double>(n_phi, 0.0));
    auto tally = [&](std::size_t i, std::size_t k, double err) {
        score[i][k] += err * err;
        score_sq[i][k] += err * err * err * err;
    };

    // Fold-to-fold warm starts: appending one observation barely moves the
    // solution, so each (fold, lambda) starts from the previous fold's
    // coefficients at the same lambda.
    std::vector<Eigen::VectorXd> warm_store(lambdas.size());

    for (const auto& fold : folds) {
        switch (variant) {
            case Variant::Lasso: {
                for (std::size_t i = 0; i < lambdas.size(); ++i) {
                    CdOptions step;
                    step.warm_start = warm_store[i].size() == fold.train.cols()
                                          ? warm_store[i]
                                          : (i > 0 ? warm_store[i - 1] : Eigen::VectorXd());
                    Eigen::VectorXd beta =
                        coordinate_descent(fold.train.values(), fold.train.target(), lambdas[i], step);
                    warm_store[i] = beta;
                    const LassoFit fit = detail::make_fit(fold.train, beta, lambdas[i], variant);
                    tally(i, 0, fit.predict_raw(fold.raw_row) - fold.realized);
                }
                break;
            }
            case Variant::Adaptive: {
                const Eigen::VectorXd pilot = ridge(fold.train, ridge_lambda).std_coefficients;
                AdaptiveWeights w;
                w.gamma = grids.gamma;
                w.source = WeightSource::Ridge;
                w.weights = Eigen::VectorXd::Ones(fold.train.cols());
                for (int j = 0; j < fold.train.cols(); ++j) {
                    if (pilot(j) == 0.0)
                        w.excluded.push_back(j);
                    else
                        w.weights(j) = 1.0 / std::pow(std::fabs(pilot(j)), grids.gamma);
                }
                for (std::size_t i = 0; i < lambdas.size(); ++i) {
                    CdOptions step;
                    step.warm_start = warm_store[i].size() == fold.train.cols()
                                          ? warm_store[i]
                                          : (i > 0 ? warm_store[i - 1] : Eigen::VectorXd());
                    const LassoFit fit = adaptive_lasso(fold.train, w, lambdas[i], step);
                    warm_store[i] = fit.std_coefficients;
                    tally(i, 0, fit.predict_raw(fold.raw_row) - fold.realized);
                }
                break;
            }
            case Variant::Relaxed: {
                for (std::size_t i = 0; i < lambdas.size(); ++i) {
                    CdOptions step;
                    step.warm_start = warm_store[i].size() == fold.train.cols()
                                          ? warm_store[i]
                                          : (i > 0 ? warm_store[i - 1] : Eigen::VectorXd());
                    Eigen::VectorXd stage1 =
                        coordinate_descent(fold.train.values(), fold.train.target(), lambdas[i], step);
                    warm_store[i] = stage1;

                    // Reuse the selection across the phi grid: build the
                    // submatrix once, chain warm starts down the phis.
                    std::vector<int> selected;
                    for (int j = 0; j < fold.train.cols(); ++j)
                        if (stage1(j) != 0.0) selected.push_back(j);

                    if (selected.empty()) {
                        const LassoFit empty = detail::make_fit(
                            fold.train, Eigen::VectorXd::Zero(fold.train.cols()), lambdas[i],
                            Variant::Relaxed);
                        for (std::size_t k = 0; k < phis.size(); ++k)
                            tally(i, k, empty.predict_raw(fold.raw_row) - fold.realized);
                        continue;
                    }

                    Eigen::MatrixXd sub(fold.train.rows(), selected.size());
                    Eigen::VectorXd warm(selected.size());
                    for (std::size_t s = 0; s < selected.size(); ++s) {
                        sub.col(s) = fold.train.values().col(selected[s]);
                        warm(s) = stage1(selected[s]);
                    }
                    for (std::size_t k = 0; k < phis.size(); ++k) {
                        CdOptions stage2;
                        stage2.warm_start = warm;
                        warm = coordinate_descent(sub, fold.train.target(),
                                                  phis[k] * lambdas[i], stage2);
                        Eigen::VectorXd full = Eigen::VectorXd::Zero(fold.train.cols());
                        for (std::size_t s = 0; s < selected.size(); ++s)
                            full(selected[s]) = warm(s);
                        const LassoFit fit =
                            detail::make_fit(fold.train, full, lambdas[i], Variant::Relaxed);
                        tally(i, k, fit.predict_raw(fold.raw_row) - fold.realized);
                    }
                }
                break;
            }
            case Variant::SqrtLasso: {
                for (std::size_t i = 0; i < lambdas.size(); ++i) {
                    const LassoFit fit = sqrt_lasso(fold.train, lambdas[i]);
                    tally(i, 0, fit.predict_raw(fold.raw_row) - fold.realized);
                }
                break;
            }
            default:
                throw ValidationError("cross_validate: unsupported variant");
        }
    }

    const double n_folds = static_cast<double>(folds.size());
    std::size_t min_i = 0, min_k = 0;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        for (std::size_t k = 0; k < score[i].size(); ++k)
            if (score[i][k] < score[min_i][min_k]) { min_i = i; min_k = k; }

    // Parsimony rule: among models whose mean score sits within one standard
    // error of the minimum, the largest lambda (then largest phi) wins.
    const double min_mean = score[min_i][min_k] / n_folds;
    const double min_var =
        std::max(score_sq[min_i][min_k] / n_folds - min_mean * min_mean, 0.0);
    const double threshold = min_mean + std::sqrt(min_var / n_folds);

    std::size_t best_i = min_i, best_k = min_k;
    bool found = false;
    for (std::size_t i = 0; i < lambdas.size() && !found; ++i)
        for (std::size_t k = 0; k < score[i].size() && !found; ++k)
            if (score[i][k] / n_folds <= threshold) { best_i = i; best_k = k; found = true; }

    chosen.lambda = lambdas[best_i];
    chosen.phi = variant == Variant::Relaxed ? phis[best_k] : 1.0;
    chosen.ridge_lambda = ridge_lambda;
    chosen.cv_mse = score[best_i][best_k] / n_folds;
    return chosen;
}

}  // namespace sparsecast
