#include "sparsecast/run_config.hpp"

#include <cstring>

#include "sparsecast/errors.hpp"

namespace sparsecast {

void RunConfig::validate() const {
    if (models.empty()) throw ValidationError("config: model list is empty");
    if (!(eval_start > train_start)) throw ValidationError("config: eval_start must follow train_start");
    if (eval_end < eval_start) throw ValidationError("config: eval_end precedes eval_start");
    if (target_id.empty()) throw ValidationError("config: target_id missing");
    if (seed == 0) throw ValidationError("config: seed is mandatory");
    if (parallelism < 1) throw ValidationError("config: parallelism must be >= 1");
}

std::vector<PeriodSplit> RunConfig::effective_splits() const {
    if (!splits.empty()) return splits;
    return {
        {"05-08", Quarter(2005, 1), Quarter(2008, 2)},
        {"08-11", Quarter(2008, 3), Quarter(2011, 2)},
        {"11-15", Quarter(2011, 3), Quarter(2014, 4)},
    };
}

namespace {

struct Fnv {
    std::uint64_t state = 1469598103934665603ULL;
    void feed(const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            state ^= bytes[i];
            state *= 1099511628211ULL;
        }
    }
    void feed(const std::string& s) { feed(s.data(), s.size()); }
    void feed(double v) { feed(&v, sizeof(v)); }
    void feed(std::uint64_t v) { feed(&v, sizeof(v)); }
    void feed(int v) { feed(&v, sizeof(v)); }
};

}  // namespace

std::uint64_t config_digest(const RunConfig& config) {
    Fnv h;
    h.feed(config.target_id);
    h.feed(static_cast<int>(config.window_mode));
    h.feed(config.window_years);
    h.feed(config.train_start.str());
    h.feed(config.eval_start.str());
    h.feed(config.eval_end.str());
    for (const auto& m : config.models) {
        h.feed(m.id);
        h.feed(static_cast<int>(m.variant));
        h.feed(m.is_arma_benchmark ? 1 : 0);
        h.feed(m.fixed_k.value_or(-1));
        h.feed(m.gamma);
        for (double phi : m.phi_grid) h.feed(phi);
        h.feed(m.fixed_lambda.value_or(-1.0));
    }
    h.feed(config.seed);
    h.feed(config.max_lag_quarters);
    h.feed(config.min_overlap_quarters);
    h.feed(config.cv_holdout_quarters);
    h.feed(config.cv_lambda_grid);
    h.feed(static_cast<int>(config.fill_method));
    h.feed(config.fill_max_p);
    h.feed(config.fill_max_q);
    h.feed(config.benchmark_max_p);
    h.feed(config.benchmark_max_q);
    h.feed(config.pp_bootstrap_reps);
    for (const auto& s : config.effective_splits()) {
        h.feed(s.label);
        h.feed(s.first.str());
        h.feed(s.last.str());
    }
    return h.state;
}

std::uint64_t dataset_digest(const Dataset& dataset) {
    Fnv h;
    for (const auto& s : dataset.monthly) {
        h.feed(s.id);
        h.feed(s.start.str());
        h.feed(s.release_lag_months);
        for (double v : s.values) h.feed(v);
    }
    for (const auto& t : dataset.targets) {
        h.feed(t.id);
        h.feed(t.start.str());
        for (double v : t.values) h.feed(v);
    }
    return h.state;
}

}  // namespace sparsecast
