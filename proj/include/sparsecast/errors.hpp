#pragma once

#include <stdexcept>
#include <string>

namespace sparsecast {

/// Bad inputs, bad files, bad configs. CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical or operational failures during a run. CLI maps these to exit code 2.
class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConstantColumnError : ValidationError {
    explicit ConstantColumnError(int column)
        : ValidationError("constant column at index " + std::to_string(column)), column(column) {}
    int column;
};

struct DimensionMismatchError : ValidationError {
    using ValidationError::ValidationError;
};

struct NonFiniteInputError : ValidationError {
    using ValidationError::ValidationError;
};

struct NoConvergenceError : RuntimeFailure {
    explicit NoConvergenceError(double lambda)
        : RuntimeFailure("coordinate descent did not converge at lambda=" + std::to_string(lambda)),
          lambda(lambda) {}
    double lambda;
};

struct RankDeficientError : RuntimeFailure {
    using RuntimeFailure::RuntimeFailure;
};

struct UnreachableCardinalityError : RuntimeFailure {
    explicit UnreachableCardinalityError(int k)
        : RuntimeFailure("no lambda reaches cardinality " + std::to_string(k)), k(k) {}
    int k;
};

struct InsufficientDataError : ValidationError {
    using ValidationError::ValidationError;
};

struct TooShortError : ValidationError {
    using ValidationError::ValidationError;
};

struct AllCandidatesFailedError : RuntimeFailure {
    using RuntimeFailure::RuntimeFailure;
};

struct HorizonZeroError : ValidationError {
    using ValidationError::ValidationError;
};

struct NonPositiveValueError : ValidationError {
    using ValidationError::ValidationError;
};

struct ZeroVarianceError : ValidationError {
    using ValidationError::ValidationError;
};

struct FrequencyMismatchError : ValidationError {
    using ValidationError::ValidationError;
};

struct MissingMetadataError : ValidationError {
    explicit MissingMetadataError(const std::string& series_id)
        : ValidationError("missing metadata for series " + series_id), series_id(series_id) {}
    std::string series_id;
};

struct GapTooLongError : RuntimeFailure {
    GapTooLongError(const std::string& series_id, int gap)
        : RuntimeFailure("trailing gap of " + std::to_string(gap) + " months for series " + series_id),
          series_id(series_id), gap(gap) {}
    std::string series_id;
    int gap;
};

struct InsufficientOverlapError : ValidationError {
    using ValidationError::ValidationError;
};

struct EmptySelectionError : ValidationError {
    using ValidationError::ValidationError;
};

struct ParseError : ValidationError {
    ParseError(const std::string& what, int line)
        : ValidationError(what + " (line " + std::to_string(line) + ")"), line(line) {}
    int line;
};

struct DuplicateDateError : ValidationError {
    using ValidationError::ValidationError;
};

struct HttpError : RuntimeFailure {
    HttpError(const std::string& what, int status) : RuntimeFailure(what), status(status) {}
    int status;
};

struct RateLimitedError : HttpError {
    explicit RateLimitedError(const std::string& what) : HttpError(what, 429) {}
};

struct UnknownSeriesError : ValidationError {
    explicit UnknownSeriesError(const std::string& series_id)
        : ValidationError("unknown series " + series_id), series_id(series_id) {}
    std::string series_id;
};

struct IoError : RuntimeFailure {
    using RuntimeFailure::RuntimeFailure;
};

}  // namespace sparsecast
