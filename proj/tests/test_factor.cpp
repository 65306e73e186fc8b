#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "sparsecast/errors.hpp"
#include "sparsecast/factor_models.hpp"
#include "sparsecast/lasso.hpp"
#include "sparsecast/pca.hpp"
#include "sparsecast/rng.hpp"
#include "support/oracles.hpp"

using namespace sparsecast;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int n, int q) {
    Eigen::MatrixXd x(n, q);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < q; ++j) x(i, j) = rng.normal();
    return x;
}

// centered columns with X'X = n I exactly
Eigen::MatrixXd orthonormal_block(Rng& rng, int n, int q) {
    Eigen::MatrixXd raw = random_matrix(rng, n, q);
    for (int j = 0; j < q; ++j) raw.col(j).array() -= raw.col(j).mean();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    Eigen::MatrixXd orth = qr.householderQ() * Eigen::MatrixXd::Identity(n, q);
    return std::sqrt(static_cast<double>(n)) * orth;
}

// expanding-origin lambda pick for a factor model, test-local; mirrors the
// library's one-standard-error preference toward the sparser end
template <typename FitFn>
double pick_lambda(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double top, FitFn fit) {
    const std::vector<double> grid = default_lambda_grid(top, 20);
    const int n = static_cast<int>(x.rows());
    const int holdout = 12;
    std::vector<double> score(grid.size(), 0.0), score_sq(grid.size(), 0.0);
    for (int t = n - holdout; t < n; ++t) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const FactorModel m = fit(x.topRows(t), y.head(t), grid[i]);
            const double err = m.predict_raw(x.row(t)) - y(t);
            score[i] += err * err;
            score_sq[i] += err * err * err * err;
        }
    }
    std::size_t min_i = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (score[i] < score[min_i]) min_i = i;
    const double mean = score[min_i] / holdout;
    const double var = std::max(score_sq[min_i] / holdout - mean * mean, 0.0);
    const double threshold = mean + std::sqrt(var / holdout);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (score[i] / holdout <= threshold) return grid[i];
    return grid[min_i];
}

}  // namespace

TEST_CASE("fit_pca on duplicated columns concentrates all variance") {
    Rng rng(3);
    Eigen::MatrixXd x(40, 2);
    for (int i = 0; i < 40; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = x(i, 0);
    }
    const PcaRotation rot = fit_pca(x);
    CHECK(rot.component_variances(0) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(rot.component_variances(1) < 1e-10);
}

TEST_CASE("fit_pca on an isotropic block returns a signed permutation") {
    Rng rng(5);
    const Eigen::MatrixXd x = orthonormal_block(rng, 80, 6);
    const PcaRotation rot = fit_pca(x);

    for (int j = 0; j < 6; ++j)
        CHECK(rot.component_variances(j) == doctest::Approx(1.0).epsilon(1e-8));

    // every loading column should be +-(a coordinate axis)
    for (int j = 0; j < 6; ++j) {
        Eigen::VectorXd v = rot.loadings.col(j).cwiseAbs();
        CHECK(v.maxCoeff() == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(v.sum() == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("fit_pca orthogonality, reconstruction and variance accounting") {
    Rng rng(7);
    const Eigen::MatrixXd x = random_matrix(rng, 100, 5);
    const PcaRotation rot = fit_pca(x);

    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(5, 5);
    CHECK((rot.loadings.transpose() * rot.loadings - eye).norm() < 1e-10);
    CHECK((rot.loadings * rot.loadings.transpose() - eye).norm() < 1e-10);

    Eigen::MatrixXd z(100, 5);
    for (int j = 0; j < 5; ++j)
        z.col(j) = (x.col(j).array() - rot.centering(j)) / rot.scaling(j);
    const Eigen::MatrixXd reconstructed = rot.scores(z) * rot.loadings.transpose();
    CHECK((reconstructed - z).cwiseAbs().maxCoeff() < 1e-8);

    const double total = (z.transpose() * z / 100.0).trace();
    CHECK(rot.component_variances.sum() == doctest::Approx(total).epsilon(1e-8));

    double cumulative = 0.0;
    for (int j = 0; j < 5; ++j) {
        cumulative += rot.component_variances(j) / total;
        CHECK(cumulative <= 1.0 + 1e-8);
        if (j > 0) CHECK(rot.component_variances(j) <= rot.component_variances(j - 1) + 1e-12);
    }
    CHECK(cumulative == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fit_pca is deterministic across runs") {
    Rng rng(11);
    const Eigen::MatrixXd x = random_matrix(rng, 60, 4);
    const PcaRotation a = fit_pca(x);
    const PcaRotation b = fit_pca(x);
    CHECK((a.loadings - b.loadings).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.component_variances - b.component_variances).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pca_lasso on an orthonormal block matches the direct lasso fit") {
    Rng rng(13);
    const int n = 90, q = 7;
    const Eigen::MatrixXd x = orthonormal_block(rng, n, q);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = x(i, 0) - 0.5 * x(i, 2) + 0.2 * rng.normal();

    const DesignMatrix d = DesignMatrix::standardize(x, y);
    const double lambda = 0.3 * lambda_max(d.values(), d.target());

    const FactorModel fm = pca_lasso(x, y, lambda);
    const LassoFit direct = lasso_fit(d, lambda);

    for (int i = 0; i < n; ++i)
        CHECK(fm.predict_raw(x.row(i)) ==
              doctest::Approx(direct.predict_raw(x.row(i))).epsilon(1e-8));
}

TEST_CASE("pca_lasso at lambda zero reproduces least squares on the block") {
    Rng rng(17);
    const int n = 60, q = 5;
    const Eigen::MatrixXd x = random_matrix(rng, n, q);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = 0.8 * x(i, 1) + 0.3 * rng.normal();

    const FactorModel fm = pca_lasso(x, y, 0.0);

    Eigen::MatrixXd with_intercept(n, q + 1);
    with_intercept.col(0).setOnes();
    with_intercept.rightCols(q) = x;
    const Eigen::VectorXd beta = oracles::normal_equations_ols(with_intercept, y);
    for (int i = 0; i < n; ++i) {
        const double ols_fit = with_intercept.row(i).dot(beta);
        CHECK(fm.predict_raw(x.row(i)) == doctest::Approx(ols_fit).epsilon(1e-8));
    }
}

TEST_CASE("pca_lasso keeps factor-space and original-space predictions equal") {
    Rng rng(19);
    const int n = 80, q = 6;
    const Eigen::MatrixXd x = random_matrix(rng, n, q);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = x(i, 0) + rng.normal();

    const FactorModel fm = pca_lasso(x, y, 0.05);
    CHECK((fm.mapped_coefficients.size()) == q);

    Eigen::MatrixXd z(n, q);
    for (int j = 0; j < q; ++j)
        z.col(j) = (x.col(j).array() - fm.rotation.centering(j)) / fm.rotation.scaling(j);

    // via factors
    Eigen::MatrixXd factors(n, fm.kept_components.size());
    for (std::size_t i = 0; i < fm.kept_components.size(); ++i)
        factors.col(i) = z * fm.rotation.loadings.col(fm.kept_components[i]);
    const Eigen::VectorXd via_factors =
        (factors * fm.factor_coefficients).array() + fm.target_mean;

    // via mapped coefficients on the original block
    const Eigen::VectorXd via_mapped = (z * fm.mapped_coefficients).array() + fm.target_mean;

    CHECK((via_factors - via_mapped).cwiseAbs().maxCoeff() < 1e-9);

    // mapped = L_kept * factor coefficients exactly
    Eigen::VectorXd mapped = Eigen::VectorXd::Zero(q);
    for (std::size_t i = 0; i < fm.kept_components.size(); ++i)
        mapped += fm.rotation.loadings.col(fm.kept_components[i]) * fm.factor_coefficients(i);
    CHECK((mapped - fm.mapped_coefficients).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pca_lasso selects the single driving factor") {
    int hits = 0;
    for (int seed = 1; seed <= 100; ++seed) {
        Rng rng(seed);
        const int n = 120, q = 10;
        Eigen::VectorXd factor(n);
        for (int i = 0; i < n; ++i) factor(i) = rng.normal();
        Eigen::MatrixXd x(n, q);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < q; ++j) x(i, j) = factor(i) + 0.3 * rng.normal();
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = 2.0 * factor(i) + 0.3 * rng.normal();

        const double top = pca_lasso_lambda_max(x, y);
        const double lambda = pick_lambda(x, y, top, [](const Eigen::MatrixXd& xs,
                                                        const Eigen::VectorXd& ys, double l) {
            return pca_lasso(xs, ys, l);
        });
        const FactorModel fm = pca_lasso(x, y, lambda);
        if (fm.active_factor_block.size() == 1 && fm.active_factor_block[0] == 0) ++hits;
    }
    CHECK(hits >= 90);
}

TEST_CASE("adapcax concentrates on the factor block when the factor drives the target") {
    int hits = 0;
    for (int seed = 1; seed <= 100; ++seed) {
        Rng rng(1000 + seed);
        const int n = 120, q = 8;
        Eigen::VectorXd factor(n);
        for (int i = 0; i < n; ++i) factor(i) = rng.normal();
        Eigen::MatrixXd x(n, q);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < q; ++j) x(i, j) = factor(i) + 0.4 * rng.normal();
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = 1.5 * factor(i) + 0.3 * rng.normal();

        const double lambda = 0.2 * adapcax_lambda_max(x, y);
        const FactorModel fm = adapcax(x, y, lambda);
        if (!fm.active_factor_block.empty() &&
            fm.active_factor_block.size() >= fm.active_original_block.size())
            ++hits;
    }
    CHECK(hits >= 90);
}

TEST_CASE("adapcax picks up an orthogonal original column") {
    int hits = 0;
    for (int seed = 1; seed <= 100; ++seed) {
        Rng rng(2000 + seed);
        const int n = 120, q = 6;
        // strongly correlated block plus one exactly independent column
        Eigen::VectorXd factor(n);
        for (int i = 0; i < n; ++i) factor(i) = rng.normal();
        Eigen::MatrixXd x(n, q);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j + 1 < q; ++j) x(i, j) = factor(i) + 0.3 * rng.normal();
            x(i, q - 1) = rng.normal();
        }
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = 1.2 * x(i, q - 1) + 0.2 * rng.normal();

        const double lambda = 0.15 * adapcax_lambda_max(x, y);
        const FactorModel fm = adapcax(x, y, lambda);
        bool found = false;
        for (int j : fm.active_original_block) found |= j == q - 1;
        if (found) ++hits;
    }
    CHECK(hits >= 90);
}

TEST_CASE("adapcax at a dominating penalty returns an empty model") {
    Rng rng(23);
    const Eigen::MatrixXd x = random_matrix(rng, 50, 5);
    Eigen::VectorXd y(50);
    for (int i = 0; i < 50; ++i) y(i) = rng.normal();

    const FactorModel fm = adapcax(x, y, adapcax_lambda_max(x, y) * 1.01);
    CHECK(fm.active_factor_block.empty());
    CHECK(fm.active_original_block.empty());
}

TEST_CASE("adapcax nests pca_lasso and the direct refit") {
    Rng rng(29);
    const int n = 100, q = 6;
    const Eigen::MatrixXd x = random_matrix(rng, n, q);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = x(i, 0) - x(i, 3) + 0.4 * rng.normal();
    const double lambda = 0.1;

    FactorLassoOptions no_original;
    no_original.exclude_original_block = true;
    const FactorModel reduced = adapcax(x, y, lambda, {}, no_original);
    const FactorModel plain = pca_lasso(x, y, lambda);
    for (int i = 0; i < n; ++i)
        CHECK(reduced.predict_raw(x.row(i)) ==
              doctest::Approx(plain.predict_raw(x.row(i))).epsilon(1e-9));

    FactorLassoOptions no_factor;
    no_factor.exclude_factor_block = true;
    const FactorModel originals_only = adapcax(x, y, lambda, {}, no_factor);
    const DesignMatrix d = DesignMatrix::standardize(x, y);
    const LassoFit direct = lasso_fit(d, lambda);
    for (int i = 0; i < n; ++i)
        CHECK(originals_only.predict_raw(x.row(i)) ==
              doctest::Approx(direct.predict_raw(x.row(i))).epsilon(1e-9));
}

TEST_CASE("factor_forecast_aggregate is the plain rotation map") {
    PcaRotation identity;
    identity.loadings = Eigen::MatrixXd::Identity(3, 3);
    identity.component_variances = Eigen::VectorXd::Ones(3);
    identity.centering = Eigen::VectorXd::Zero(3);
    identity.scaling = Eigen::VectorXd::Ones(3);

    Eigen::VectorXd x(3);
    x << 1.0, -2.0, 0.5;
    CHECK((factor_forecast_aggregate(x, identity) - x).cwiseAbs().maxCoeff() == 0.0);

    PcaRotation swap = identity;
    swap.loadings.resize(2, 2);
    swap.loadings << 0, 1, 1, 0;
    swap.component_variances = Eigen::VectorXd::Ones(2);
    swap.centering = Eigen::VectorXd::Zero(2);
    swap.scaling = Eigen::VectorXd::Ones(2);
    Eigen::VectorXd ab(2);
    ab << 3.0, 4.0;
    const Eigen::VectorXd swapped = factor_forecast_aggregate(ab, swap);
    CHECK(swapped(0) == doctest::Approx(4.0));
    CHECK(swapped(1) == doctest::Approx(3.0));

    Rng rng(31);
    const Eigen::MatrixXd block = random_matrix(rng, 50, 3);
    const PcaRotation rot = fit_pca(block);
    Eigen::VectorXd forecast(3);
    forecast << 0.7, -0.1, 0.4;
    const Eigen::VectorXd mapped = factor_forecast_aggregate(forecast, rot);
    for (int j = 0; j < 3; ++j) {
        double dot = 0.0;
        for (int i = 0; i < 3; ++i) dot += rot.loadings(i, j) * forecast(i);
        CHECK(mapped(j) == doctest::Approx(dot).epsilon(1e-12));
    }

    Eigen::VectorXd wrong(4);
    wrong.setZero();
    CHECK_THROWS_AS(factor_forecast_aggregate(wrong, rot), DimensionMismatchError);
}

TEST_CASE("post-lasso factor model: both modes coincide in sample") {
    Rng rng(37);
    const int n = 90, q = 8;
    const Eigen::MatrixXd x = random_matrix(rng, n, q);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = x(i, 0) + 0.5 * rng.normal();

    const PostLassoForecast direct = post_lasso_factor_model(x, y, 5, PostLassoForecastMode::Direct, 0);
    const PostLassoForecast agg =
        post_lasso_factor_model(x, y, 5, PostLassoForecastMode::Aggregated, 0);
    CHECK(direct.forecast == agg.forecast);
}

TEST_CASE("post-lasso factor model with all components equals block least squares") {
    Rng rng(41);
    const int n = 70, q = 5;
    const Eigen::MatrixXd x = random_matrix(rng, n, q);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = 0.6 * x(i, 2) - x(i, 4) + 0.3 * rng.normal();

    const PostLassoForecast fit = post_lasso_factor_model(x, y, q, PostLassoForecastMode::Direct, 0);

    Eigen::MatrixXd with_intercept(n, q + 1);
    with_intercept.col(0).setOnes();
    with_intercept.rightCols(q) = x;
    const Eigen::VectorXd beta = oracles::normal_equations_ols(with_intercept, y);
    const double ols_last = with_intercept.row(n - 1).dot(beta);
    CHECK(fit.forecast == doctest::Approx(ols_last).epsilon(1e-8));
}

TEST_CASE("aggregated post-lasso forecast equals the hand-composed pipeline") {
    Rng rng(43);
    const int n = 120, q = 4;
    // AR(1) variables sharing a common AR(1) factor
    Eigen::VectorXd factor(n);
    factor(0) = rng.normal();
    for (int i = 1; i < n; ++i) factor(i) = 0.7 * factor(i - 1) + rng.normal();
    Eigen::MatrixXd x(n, q);
    for (int j = 0; j < q; ++j) {
        double own = rng.normal();
        for (int i = 0; i < n; ++i) {
            own = 0.5 * own + rng.normal();
            x(i, j) = factor(i) + 0.5 * own;
        }
    }
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = factor(i) + 0.4 * rng.normal();

    const int k = 2;
    const PostLassoForecast fit =
        post_lasso_factor_model(x, y, k, PostLassoForecastMode::Aggregated, 1);

    // hand composition: standardize, per-variable ARMA forecast, rotate, apply OLS
    const PcaRotation rot = fit_pca(x);
    Eigen::MatrixXd z(n, q);
    for (int j = 0; j < q; ++j)
        z.col(j) = (x.col(j).array() - rot.centering(j)) / rot.scaling(j);
    Eigen::VectorXd x_hat(q);
    for (int j = 0; j < q; ++j) {
        const Eigen::VectorXd series = z.col(j);
        const ArmaModel m = fit_arma(series);
        x_hat(j) = forecast_arma(m, series, 1)(0);
    }
    Eigen::VectorXd f_hat(q);
    for (int j = 0; j < q; ++j) {
        double dot = 0.0;
        for (int i = 0; i < q; ++i) dot += rot.loadings(i, j) * x_hat(i);
        f_hat(j) = dot;
    }
    const Eigen::MatrixXd factors = z * rot.loadings;
    Eigen::MatrixXd design(n, 1 + k);
    design.col(0).setOnes();
    design.rightCols(k) = factors.leftCols(k);
    const Eigen::VectorXd beta = oracles::normal_equations_ols(design, y);
    double expected = beta(0);
    for (int j = 0; j < k; ++j) expected += beta(1 + j) * f_hat(j);

    CHECK(fit.forecast == doctest::Approx(expected).epsilon(1e-10));
}
