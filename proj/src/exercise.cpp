#include "sparsecast/exercise.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "sparsecast/cross_validation.hpp"
#include "sparsecast/errors.hpp"
#include "sparsecast/estimators.hpp"
#include "sparsecast/factor_models.hpp"
#include "sparsecast/report.hpp"

namespace sparsecast {

namespace {

struct QuarterOutput {
    std::vector<ForecastRecord> records;
    int violations = 0;
};

std::vector<ForecastRecord> skeleton_records(const RunConfig& config, const ModelSpec& model,
                                             Quarter origin) {
    std::vector<ForecastRecord> out;
    for (Horizon h : {Horizon::Backcast, Horizon::Nowcast, Horizon::Fore1Q, Horizon::Fore2Q}) {
        ForecastRecord r;
        r.target_id = config.target_id;
        r.origin = origin;
        r.horizon = h;
        r.model_id = model.id;
        out.push_back(std::move(r));
    }
    return out;
}

// Raw selected-column block for the factor models.
Eigen::MatrixXd select_raw_columns(const Eigen::MatrixXd& raw, const std::vector<int>& subset) {
    Eigen::MatrixXd out(raw.rows(), subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) out.col(i) = raw.col(subset[i]);
    return out;
}

// Expanding-origin lambda choice for the factor-space second stage; each fold
// refits the rotation from scratch.
double second_stage_lambda(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y, bool augmented,
                           int holdout, int grid_size) {
    const int n = static_cast<int>(x_raw.rows());
    holdout = std::min(holdout, n - 8);
    if (holdout < 1) {
        const double top =
            augmented ? adapcax_lambda_max(x_raw, y) : pca_lasso_lambda_max(x_raw, y);
        return 0.1 * top;
    }

    const double top = augmented ? adapcax_lambda_max(x_raw, y) : pca_lasso_lambda_max(x_raw, y);
    const std::vector<double> grid = default_lambda_grid(top, grid_size);

    std::vector<double> score(grid.size(), 0.0);
    for (int t = n - holdout; t < n; ++t) {
        const Eigen::MatrixXd train_x = x_raw.topRows(t);
        const Eigen::VectorXd train_y = y.head(t);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const FactorModel m = augmented ? adapcax(train_x, train_y, grid[i])
                                            : pca_lasso(train_x, train_y, grid[i]);
            const double err = m.predict_raw(x_raw.row(t)) - y(t);
            score[i] += err * err;
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (score[i] < score[best]) best = i;
    return grid[best];
}

// CV results shared across the models of one quarter: the stage-1 problems
// of PCA-LASSO / AdaPCAX are exactly the plain LASSO / Adaptive ones.
struct QuarterCache {
    std::optional<ChosenHyperparameters> lasso;
    std::optional<ChosenHyperparameters> adaptive;

    const ChosenHyperparameters& lasso_choice(const DesignMatrix& x, const HyperGrids& grids) {
        if (!lasso) lasso = cross_validate(x, Variant::Lasso, grids);
        return *lasso;
    }
    const ChosenHyperparameters& adaptive_choice(const DesignMatrix& x, const HyperGrids& grids) {
        if (!adaptive) adaptive = cross_validate(x, Variant::Adaptive, grids);
        return *adaptive;
    }
};

AdaptiveWeights ridge_pilot_weights(const DesignMatrix& x, double ridge_lambda, double gamma) {
    const Eigen::VectorXd pilot = ridge(x, ridge_lambda).std_coefficients;
    AdaptiveWeights w;
    w.gamma = gamma;
    w.weights = Eigen::VectorXd::Ones(x.cols());
    for (int j = 0; j < x.cols(); ++j) {
        if (pilot(j) == 0.0)
            w.excluded.push_back(j);
        else
            w.weights(j) = 1.0 / std::pow(std::fabs(pilot(j)), gamma);
    }
    return w;
}

void fit_and_predict(const RunConfig& config, const ModelSpec& model, const QuarterlyDesign& design,
                     const TimeSeries& target_history, Quarter window_start,
                     QuarterCache& cache, std::vector<ForecastRecord>& records) {
    const DesignMatrix& x = design.design;

    if (model.is_arma_benchmark) {
        // Benchmark on the (window-sliced) published target history; no backcast.
        const Quarter hist_start = std::max(target_history.start_quarter(), window_start);
        const int offset = hist_start - target_history.start_quarter();
        const int len = target_history.size() - offset;
        if (len < 20 + config.benchmark_max_p + config.benchmark_max_q)
            throw TooShortError("benchmark history too short");
        Eigen::VectorXd y(len);
        for (int i = 0; i < len; ++i) y(i) = target_history.values[offset + i];

        ArmaFitOptions opts;
        opts.max_p = config.benchmark_max_p;
        opts.max_q = config.benchmark_max_q;
        const ArmaModel arma = fit_arma(y, opts);
        const Eigen::VectorXd fc = forecast_arma(arma, y, 4);
        // history ends two quarters before the origin: nowcast = step 2
        records[1].point = fc(1);
        records[2].point = fc(2);
        records[3].point = fc(3);
        return;
    }

    HyperGrids grids;
    grids.holdout = config.cv_holdout_quarters;
    grids.gamma = model.gamma;
    grids.phis = model.phi_grid;
    // Wide designs get a higher grid floor: below it the solution approaches
    // an interpolator and coordinate descent stalls.
    const double floor_ratio = x.cols() >= x.rows() ? 1e-2 : 1e-3;
    grids.lambdas = default_lambda_grid(lambda_max(x.values(), x.target()),
                                        config.cv_lambda_grid, floor_ratio);

    auto attach = [&](const LassoFit& fit) {
        std::vector<ColumnMeta> active;
        for (int j : fit.active_set) active.push_back(x.columns()[j]);
        for (int h = 0; h < 4; ++h) {
            records[h].point = fit.predict_raw(design.prediction_raw.row(h));
            records[h].active_columns = active;
        }
    };

    switch (model.variant) {
        case Variant::Lasso: {
            LassoFit fit;
            if (model.fixed_k)
                fit = path_at_cardinality(x, *model.fixed_k, Variant::Lasso);
            else if (model.fixed_lambda)
                fit = lasso_fit(x, *model.fixed_lambda);
            else
                fit = lasso_fit(x, cache.lasso_choice(x, grids).lambda);
            attach(fit);
            return;
        }
        case Variant::SqrtLasso: {
            attach(sqrt_lasso(x, model.fixed_lambda ? std::optional<double>(*model.fixed_lambda)
                                                    : std::nullopt));
            return;
        }
        case Variant::Adaptive: {
            if (model.fixed_k) {
                const AdaptiveWeights w =
                    adaptive_weights(x, model.gamma, WeightSource::Ridge, grids.holdout);
                attach(path_at_cardinality(x, *model.fixed_k, Variant::Adaptive, &w));
                return;
            }
            const ChosenHyperparameters& chosen = cache.adaptive_choice(x, grids);
            const AdaptiveWeights w = ridge_pilot_weights(x, chosen.ridge_lambda, model.gamma);
            attach(adaptive_lasso(x, w, chosen.lambda));
            return;
        }
        case Variant::Relaxed: {
            const ChosenHyperparameters chosen = cross_validate(x, Variant::Relaxed, grids);
            attach(relaxed_lasso(x, chosen.lambda, chosen.phi));
            return;
        }
        case Variant::PcaLasso:
        case Variant::AdaPcaX: {
            const bool augmented = model.variant == Variant::AdaPcaX;

            // Stage 1: pre-select with LASSO (PCA) or Adaptive LASSO (AdaPCAX).
            LassoFit stage1;
            if (model.fixed_k) {
                if (augmented) {
                    const AdaptiveWeights w =
                        adaptive_weights(x, model.gamma, WeightSource::Ridge, grids.holdout);
                    stage1 = path_at_cardinality(x, *model.fixed_k, Variant::Adaptive, &w);
                } else {
                    stage1 = path_at_cardinality(x, *model.fixed_k, Variant::Lasso);
                }
            } else if (augmented) {
                const ChosenHyperparameters& c1 = cache.adaptive_choice(x, grids);
                stage1 = adaptive_lasso(x, ridge_pilot_weights(x, c1.ridge_lambda, model.gamma),
                                        c1.lambda);
            } else {
                stage1 = lasso_fit(x, cache.lasso_choice(x, grids).lambda);
            }

            if (stage1.active_set.empty()) {
                // Intercept-only: predict the training target mean.
                for (int h = 0; h < 4; ++h) records[h].point = x.target_mean();
                return;
            }

            const Eigen::MatrixXd raw = x.raw_values();
            const Eigen::MatrixXd x_sel = select_raw_columns(raw, stage1.active_set);
            const Eigen::VectorXd y_raw = x.raw_target();
            std::vector<ColumnMeta> sel_cols;
            for (int j : stage1.active_set) sel_cols.push_back(x.columns()[j]);

            const double lambda2 = second_stage_lambda(x_sel, y_raw, augmented, grids.holdout,
                                                       config.cv_lambda_grid);
            const FactorModel fm = augmented ? adapcax(x_sel, y_raw, lambda2, sel_cols)
                                             : pca_lasso(x_sel, y_raw, lambda2, sel_cols);

            const std::vector<ColumnMeta> active = fm.active_columns();
            for (int h = 0; h < 4; ++h) {
                Eigen::VectorXd row(stage1.active_set.size());
                for (std::size_t i = 0; i < stage1.active_set.size(); ++i)
                    row(i) = design.prediction_raw(h, stage1.active_set[i]);
                records[h].point = fm.predict_raw(row);
                records[h].active_columns = active;
            }
            return;
        }
        default:
            throw ValidationError("model variant not runnable in the exercise: " + model.id);
    }
}

QuarterOutput run_quarter(const Dataset& dataset, const RunConfig& config, Quarter origin) {
    QuarterOutput out;

    const Quarter window_start = config.window_mode == WindowMode::Rolling
                                     ? origin - 4 * config.window_years
                                     : config.train_start;

    Vintage vintage;
    Vintage filled;
    QuarterlyDesign design;
    bool frame_ok = true;
    try {
        vintage = build_vintage(dataset, config.target_id, origin.last_month());
        ArmaFitOptions fill_opts;
        fill_opts.max_p = config.fill_max_p;
        fill_opts.max_q = config.fill_max_q;
        filled = fill_ragged_edges(vintage, config.fill_method, fill_opts);

        BuildDesignOptions design_opts;
        design_opts.max_lag_quarters = config.max_lag_quarters;
        design_opts.min_overlap_quarters = config.min_overlap_quarters;
        design_opts.window_start = window_start;
        design = build_design(filled, config.target_id, design_opts);

        out.violations += audit_no_look_ahead(vintage, filled, design);
    } catch (const std::exception&) {
        frame_ok = false;
    }

    QuarterCache cache;
    for (const auto& model : config.models) {
        std::vector<ForecastRecord> records = skeleton_records(config, model, origin);
        if (frame_ok) {
            try {
                fit_and_predict(config, model, design, vintage.target_history, window_start,
                                cache, records);
            } catch (const std::exception&) {
                for (auto& r : records) { r.failed = true; r.point.reset(); }
            }
        } else {
            for (auto& r : records) r.failed = true;
        }
        for (auto& r : records) out.records.push_back(std::move(r));
    }
    return out;
}

}  // namespace

ExerciseOutcome run_exercise(const Dataset& dataset, const RunConfig& config) {
    config.validate();

    std::vector<Quarter> origins;
    for (Quarter q = config.eval_start; q <= config.eval_end; ++q) origins.push_back(q);

    std::vector<QuarterOutput> outputs(origins.size());
    const int jobs = std::max(1, config.parallelism);
    if (jobs == 1) {
        for (std::size_t i = 0; i < origins.size(); ++i)
            outputs[i] = run_quarter(dataset, config, origins[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= origins.size()) break;
                outputs[i] = run_quarter(dataset, config, origins[i]);
            }
        };
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    ExerciseOutcome outcome;
    const TimeSeries& target = dataset.target(config.target_id);
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        outcome.look_ahead_violations += outputs[i].violations;
        for (auto& record : outputs[i].records) {
            const Quarter tq = record.target_quarter();
            const int idx = tq - target.start_quarter();
            if (idx >= 0 && idx < target.size()) record.realized = target.values[idx];
            outcome.records.push_back(std::move(record));
        }
    }
    return outcome;
}

}  // namespace sparsecast
