#include "sparsecast/lasso.hpp"

#include <cmath>

#include "sparsecast/errors.hpp"

namespace sparsecast {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::Lasso: return "lasso";
        case Variant::SqrtLasso: return "sqrt_lasso";
        case Variant::Adaptive: return "adaptive";
        case Variant::Relaxed: return "relaxed";
        case Variant::PcaLasso: return "pca_lasso";
        case Variant::AdaPcaX: return "adapcax";
        case Variant::Ols: return "ols";
        case Variant::Ridge: return "ridge";
    }
    return "?";
}

double soft_threshold(double rho, double lambda) {
    if (rho > lambda) return rho - lambda;
    if (rho < -lambda) return rho + lambda;
    return 0.0;
}

double lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& penalty_scale) {
    const int n = static_cast<int>(x.rows());
    Eigen::VectorXd corr = (x.transpose() * y).cwiseAbs() / n;
    if (penalty_scale.size() > 0) {
        for (int j = 0; j < corr.size(); ++j)
            corr(j) = penalty_scale(j) > 0.0 ? corr(j) / penalty_scale(j) : 0.0;
    }
    return corr.size() > 0 ? corr.maxCoeff() : 0.0;
}

std::vector<double> default_lambda_grid(double lambda_max_value, int count, double ratio) {
    std::vector<double> grid(count);
    if (lambda_max_value <= 0.0) lambda_max_value = 1e-12;
    const double log_top = std::log(lambda_max_value);
    const double log_bot = std::log(lambda_max_value * ratio);
    for (int i = 0; i < count; ++i) {
        const double t = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
        grid[i] = std::exp(log_top + t * (log_bot - log_top));
    }
    return grid;
}

Eigen::VectorXd coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   double lambda, const CdOptions& options) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    if (!x.allFinite() || !y.allFinite()) throw NonFiniteInputError("non-finite solver input");

    Eigen::VectorXd beta = options.warm_start.size() == p ? options.warm_start
                                                          : Eigen::VectorXd::Zero(p);
    Eigen::VectorXd penalty = options.penalty_scale.size() == p ? options.penalty_scale
                                                                : Eigen::VectorXd::Ones(p);

    Eigen::VectorXd col_sqnorm(p);
    for (int j = 0; j < p; ++j) col_sqnorm(j) = x.col(j).squaredNorm() / n;

    Eigen::VectorXd residual = y - x * beta;

    auto sweep = [&](const std::vector<int>& cols) {
        double max_change = 0.0;
        for (int j : cols) {
            if (col_sqnorm(j) <= 0.0) { beta(j) = 0.0; continue; }
            const double old = beta(j);
            const double rho = x.col(j).dot(residual) / n + col_sqnorm(j) * old;
            const double updated = soft_threshold(rho, lambda * penalty(j)) / col_sqnorm(j);
            if (updated != old) {
                residual += x.col(j) * (old - updated);
                beta(j) = updated;
                max_change = std::max(max_change, std::fabs(updated - old));
            }
        }
        return max_change;
    };

    std::vector<int> all_cols(p);
    for (int j = 0; j < p; ++j) all_cols[j] = j;

    // Collinear blocks (the AdaPCAX augmentation is one by construction) make
    // the minimizer a face: coefficients slide along it with tiny objective
    // gains while their per-sweep change stays above tol. The stationarity
    // certificate is the criterion that actually matters, so a sufficiently
    // small KKT violation also counts as converged.
    const double kkt_stop = 1e-8;
    auto kkt_ok = [&]() {
        double worst = 0.0;
        for (int j = 0; j < p; ++j) {
            const double g = x.col(j).dot(residual) / n;
            const double bound = lambda * penalty(j);
            if (beta(j) == 0.0)
                worst = std::max(worst, std::fabs(g) - bound);
            else
                worst = std::max(worst, std::fabs(g - bound * (beta(j) > 0 ? 1.0 : -1.0)));
            if (worst > kkt_stop) return false;
        }
        return true;
    };

    // Exactly tied or collinear columns can trap cyclic descent in a
    // floating-point limit cycle. The rescue is a small active-set iteration:
    // solve the sign-restricted stationarity system exactly, drop columns
    // whose sign flips, add the worst violator, repeat. Accepts only a
    // certified global optimum.
    auto try_face_solve = [&]() -> bool {
        std::vector<int> active;
        std::vector<double> signs;
        for (int j = 0; j < p; ++j)
            if (beta(j) != 0.0) {
                active.push_back(j);
                signs.push_back(beta(j) > 0 ? 1.0 : -1.0);
            }
        // aimed at small collinear blocks; a large active set would just buy
        // an expensive decomposition
        if (active.empty() || active.size() > 64) return false;

        const Eigen::VectorXd saved_beta = beta;
        for (int attempt = 0; attempt < 10 && !active.empty(); ++attempt) {
            const int m = static_cast<int>(active.size());
            Eigen::MatrixXd sub(x.rows(), m);
            for (int i = 0; i < m; ++i) sub.col(i) = x.col(active[i]);
            Eigen::MatrixXd gram = sub.transpose() * sub / n;
            Eigen::VectorXd rhs = sub.transpose() * y / n;
            for (int i = 0; i < m; ++i) rhs(i) -= lambda * penalty(active[i]) * signs[i];

            Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
            svd.setThreshold(1e-12);
            const Eigen::VectorXd candidate = svd.solve(rhs);

            int flipped = -1;
            double worst_flip = 0.0;
            for (int i = 0; i < m; ++i) {
                const double wrong_way = -candidate(i) * signs[i];
                if (wrong_way > worst_flip) { worst_flip = wrong_way; flipped = i; }
            }
            if (flipped >= 0) {
                active.erase(active.begin() + flipped);
                signs.erase(signs.begin() + flipped);
                continue;
            }

            beta.setZero();
            for (int i = 0; i < m; ++i) beta(active[i]) = candidate(i);
            residual = y - x * beta;
            if (kkt_ok()) return true;

            // add the single worst violator with the sign of its correlation
            int worst_j = -1;
            double worst_violation = 0.0;
            double worst_grad = 0.0;
            for (int j = 0; j < p; ++j) {
                if (beta(j) != 0.0) continue;
                const double g = x.col(j).dot(residual) / n;
                const double violation = std::fabs(g) - lambda * penalty(j);
                if (violation > worst_violation) {
                    worst_violation = violation;
                    worst_j = j;
                    worst_grad = g;
                }
            }
            if (worst_j < 0) break;
            active.push_back(worst_j);
            signs.push_back(worst_grad > 0 ? 1.0 : -1.0);
        }
        beta = saved_beta;
        residual = y - x * beta;
        return false;
    };

    long sweeps = 0;
    while (true) {
        // Full pass, then iterate on the active set until stable.
        double change = sweep(all_cols);
        if (++sweeps > options.max_sweeps) throw NoConvergenceError(lambda);
        if (change < options.tol) break;
        if (kkt_ok()) return beta;

        std::vector<int> active;
        active.reserve(p);
        for (int j = 0; j < p; ++j)
            if (beta(j) != 0.0) active.push_back(j);

        // Most solves finish in well under 64 active-set sweeps; past that a
        // degenerate geometry is likely (collinear ridge or a floating-point
        // limit cycle), so the heavier rescue tools engage: a KKT early exit,
        // Aitken-style extrapolation of the per-sweep displacement, and the
        // exact active-set face solve.
        Eigen::VectorXd previous_delta;
        Eigen::VectorXd before;
        double previous_norm = 0.0;
        long inner_iter = 0;
        while (true) {
            ++inner_iter;
            const bool engaged = inner_iter >= 64;
            if (engaged) before = beta;

            double inner_change = sweep(active);
            if (++sweeps > options.max_sweeps) throw NoConvergenceError(lambda);
            if (inner_change < options.tol) break;
            if (!engaged) continue;

            if (inner_iter % 16 == 0 && kkt_ok()) return beta;
            if (inner_iter % 512 == 0 && try_face_solve()) return beta;

            const Eigen::VectorXd delta = beta - before;
            const double norm = delta.norm();
            if (previous_norm > 0.0 && norm > 0.0) {
                const double cosine = delta.dot(previous_delta) / (norm * previous_norm);
                const double ratio = norm / previous_norm;
                if (cosine > 0.99999 && std::fabs(ratio - 1.0) < 1e-3) {
                    // limit of the geometric tail; a constant-velocity slide
                    // (ratio ~ 1) takes a long bounded hop instead
                    double step = ratio < 1.0 ? std::min(ratio / (1.0 - ratio), 65536.0) : 4096.0;
                    for (int j : active)
                        if (delta(j) != 0.0 && beta(j) * delta(j) < 0.0)
                            step = std::min(step, -beta(j) / delta(j));
                    if (step > 1.0) {
                        beta += step * delta;
                        residual = y - x * beta;
                    }
                    previous_norm = 0.0;
                    continue;
                }
            }
            previous_delta = delta;
            previous_norm = norm;
        }
        if (sweeps > 4096 && try_face_solve()) return beta;
    }
    return beta;
}

namespace detail {

LassoFit make_fit(const DesignMatrix& x, const Eigen::VectorXd& std_beta, double lambda,
                  Variant variant) {
    LassoFit fit;
    fit.std_coefficients = std_beta;
    fit.lambda = lambda;
    fit.variant = variant;

    const int p = x.cols();
    fit.coefficients.resize(p);
    double intercept = x.target_mean();
    for (int j = 0; j < p; ++j) {
        fit.coefficients(j) = std_beta(j) / x.column_sds()(j);
        intercept -= fit.coefficients(j) * x.column_means()(j);
        if (std_beta(j) != 0.0) fit.active_set.push_back(j);
    }
    fit.intercept = intercept;
    fit.empty_active_set = fit.active_set.empty();

    const int n = x.rows();
    const double rss = (x.target() - x.values() * std_beta).squaredNorm();
    fit.objective_value = rss / (2.0 * n) + lambda * std_beta.cwiseAbs().sum();
    fit.zero_residual = rss < 1e-24;
    return fit;
}

}  // namespace detail

LassoFit lasso_fit(const DesignMatrix& x, double lambda, const CdOptions& options) {
    Eigen::VectorXd beta = coordinate_descent(x.values(), x.target(), lambda, options);
    return detail::make_fit(x, beta, lambda, Variant::Lasso);
}

LassoPath lasso_path(const DesignMatrix& x, std::optional<std::vector<double>> lambdas,
                     const CdOptions& options) {
    std::vector<double> grid =
        lambdas ? *lambdas : default_lambda_grid(lambda_max(x.values(), x.target(), options.penalty_scale));
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] >= grid[i - 1]) throw ValidationError("lambda grid must be strictly decreasing");

    LassoPath path;
    path.lambdas = grid;
    path.fits.reserve(grid.size());
    path.n_active.reserve(grid.size());

    CdOptions step = options;
    for (double lambda : grid) {
        Eigen::VectorXd beta = coordinate_descent(x.values(), x.target(), lambda, step);
        step.warm_start = beta;
        LassoFit fit = detail::make_fit(x, beta, lambda, Variant::Lasso);
        path.n_active.push_back(static_cast<int>(fit.active_set.size()));
        path.fits.push_back(std::move(fit));
    }
    return path;
}

double kkt_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta, double lambda,
                     const Eigen::VectorXd& penalty_scale) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    Eigen::VectorXd grad = x.transpose() * (y - x * beta) / n;
    double worst = 0.0;
    for (int j = 0; j < p; ++j) {
        const double w = penalty_scale.size() == p ? penalty_scale(j) : 1.0;
        if (beta(j) == 0.0) {
            worst = std::max(worst, std::fabs(grad(j)) - lambda * w);
        } else {
            worst = std::max(worst, std::fabs(grad(j) - lambda * w * (beta(j) > 0 ? 1.0 : -1.0)));
        }
    }
    return worst;
}

}  // namespace sparsecast
