#include "sparsecast/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparsecast/errors.hpp"

namespace sparsecast {

PcaRotation fit_pca(const Eigen::MatrixXd& x_selected) {
    if (!x_selected.allFinite()) throw NonFiniteInputError("fit_pca: non-finite input");
    const int n = static_cast<int>(x_selected.rows());
    const int q = static_cast<int>(x_selected.cols());
    if (n < 2 || q < 1) throw InsufficientDataError("fit_pca needs n >= 2 and q >= 1");

    PcaRotation rot;
    rot.centering.resize(q);
    rot.scaling.resize(q);
    Eigen::MatrixXd z(n, q);
    for (int j = 0; j < q; ++j) {
        const double mean = x_selected.col(j).mean();
        const double sd = std::sqrt((x_selected.col(j).array() - mean).square().sum() / n);
        rot.centering(j) = mean;
        rot.scaling(j) = sd > 1e-12 ? sd : 1.0;
        z.col(j) = (x_selected.col(j).array() - mean) / rot.scaling(j);
    }

    const Eigen::MatrixXd cov = z.transpose() * z / n;

    // A numerically diagonal covariance has a degenerate eigenbasis whenever
    // variances tie; pick the coordinate axes so the rotation is stable.
    double off_diagonal = 0.0;
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
            if (a != b) off_diagonal = std::max(off_diagonal, std::fabs(cov(a, b)));
    if (off_diagonal < 1e-10) {
        std::vector<int> order(q);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return cov(a, a) > cov(b, b); });
        rot.loadings = Eigen::MatrixXd::Zero(q, q);
        rot.component_variances.resize(q);
        for (int k = 0; k < q; ++k) {
            rot.loadings(order[k], k) = 1.0;
            rot.component_variances(k) = std::max(cov(order[k], order[k]), 0.0);
        }
        return rot;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw RuntimeFailure("fit_pca: eigendecomposition failed");

    // SelfAdjointEigenSolver returns ascending eigenvalues; reorder descending.
    std::vector<int> order(q);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return eig.eigenvalues()(a) > eig.eigenvalues()(b); });

    rot.loadings.resize(q, q);
    rot.component_variances.resize(q);
    for (int k = 0; k < q; ++k) {
        Eigen::VectorXd v = eig.eigenvectors().col(order[k]);
        int arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        rot.loadings.col(k) = v;
        rot.component_variances(k) = std::max(eig.eigenvalues()(order[k]), 0.0);
    }
    return rot;
}

Eigen::VectorXd factor_forecast_aggregate(const Eigen::VectorXd& x_hat_future,
                                          const PcaRotation& rotation) {
    if (x_hat_future.size() != rotation.size())
        throw DimensionMismatchError("factor_forecast_aggregate: forecast length != q");
    return rotation.loadings.transpose() * x_hat_future;
}

}  // namespace sparsecast
