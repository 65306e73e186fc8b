#include "sparsecast/design_matrix.hpp"

#include "sparsecast/errors.hpp"

namespace sparsecast {

DesignMatrix DesignMatrix::standardize(const Eigen::MatrixXd& raw, const Eigen::VectorXd& target,
                                       std::vector<ColumnMeta> columns, bool tolerate_constant) {
    const int n = static_cast<int>(raw.rows());
    const int p = static_cast<int>(raw.cols());
    if (target.size() != n)
        throw DimensionMismatchError("target length " + std::to_string(target.size()) +
                                     " != row count " + std::to_string(n));
    if (n < 2) throw InsufficientDataError("standardize needs at least 2 rows");
    if (!raw.allFinite() || !target.allFinite()) throw NonFiniteInputError("non-finite input");

    DesignMatrix out;
    out.values_.resize(n, p);
    out.col_mean_.resize(p);
    out.col_sd_.resize(p);

    for (int j = 0; j < p; ++j) {
        const double mean = raw.col(j).mean();
        const double var = (raw.col(j).array() - mean).square().sum() / n;
        const double sd = std::sqrt(var);
        if (sd < 1e-12) {
            if (!tolerate_constant) throw ConstantColumnError(j);
            out.col_mean_(j) = mean;
            out.col_sd_(j) = 1.0;
            out.values_.col(j).setZero();
            continue;
        }
        out.col_mean_(j) = mean;
        out.col_sd_(j) = sd;
        out.values_.col(j) = (raw.col(j).array() - mean) / sd;
    }

    out.target_mean_ = target.mean();
    out.target_ = target.array() - out.target_mean_;

    if (!columns.empty() && static_cast<int>(columns.size()) != p)
        throw DimensionMismatchError("column metadata length != p");
    if (columns.empty()) {
        columns.resize(p);
        for (int j = 0; j < p; ++j) columns[j] = ColumnMeta{"x" + std::to_string(j), 0};
    }
    out.columns_ = std::move(columns);
    return out;
}

Eigen::MatrixXd DesignMatrix::raw_values() const {
    Eigen::MatrixXd raw = values_;
    for (int j = 0; j < cols(); ++j)
        raw.col(j) = values_.col(j).array() * col_sd_(j) + col_mean_(j);
    return raw;
}

Eigen::VectorXd DesignMatrix::raw_target() const {
    return target_.array() + target_mean_;
}

Eigen::VectorXd DesignMatrix::standardize_row(const Eigen::VectorXd& raw_row) const {
    if (raw_row.size() != cols()) throw DimensionMismatchError("row length != p");
    return ((raw_row - col_mean_).array() / col_sd_.array()).matrix();
}

DesignMatrix DesignMatrix::head(int n_rows, bool tolerate_constant) const {
    if (n_rows > rows()) throw DimensionMismatchError("head larger than sample");
    Eigen::MatrixXd raw = raw_values().topRows(n_rows);
    Eigen::VectorXd y = raw_target().head(n_rows);
    return standardize(raw, y, columns_, tolerate_constant);
}

}  // namespace sparsecast
