// Writes the synthetic demo dataset and a ready-to-run config under a target
// directory (default data/demo).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "sparsecast/panel_io.hpp"
#include "sparsecast/synthetic.hpp"

using namespace sparsecast;

int main(int argc, char** argv) {
    std::string out_dir = argc > 1 ? argv[1] : "data/demo";
    const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 20250401ULL;

    const SyntheticWorld world = generate_world(seed);
    std::filesystem::create_directories(out_dir);

    Dataset monthly_only;
    monthly_only.monthly = world.dataset.monthly;
    write_panel(monthly_only, out_dir + "/panel.csv", out_dir + "/metadata.csv");

    Dataset targets_only;
    targets_only.targets = world.dataset.targets;
    write_panel(targets_only, out_dir + "/targets.csv", out_dir + "/targets_metadata.csv");

    std::ofstream config(out_dir + "/config.json");
    config << R"({
  "schema_version": 1,
  "target_id": "Y",
  "window_mode": "expanding",
  "train_start": "1994-Q1",
  "eval_start": "2003-Q1",
  "eval_end": "2006-Q2",
  "seed": 42,
  "parallelism": 2,
  "cv_holdout_quarters": 12,
  "cv_lambda_grid": 20,
  "fill_max_p": 2,
  "fill_max_q": 1,
  "splits": [
    {"label": "03-04", "first": "2003-Q1", "last": "2004-Q4"},
    {"label": "05-06", "first": "2005-Q1", "last": "2006-Q2"}
  ],
  "models": [
    {"id": "LASSO", "variant": "lasso"},
    {"id": "Adaptive", "variant": "adaptive"},
    {"id": "Relaxed", "variant": "relaxed"},
    {"id": "Sqrt", "variant": "sqrt"},
    {"id": "PCA", "variant": "pca"},
    {"id": "AdaPCAX", "variant": "adapcax"},
    {"id": "ARMA", "benchmark": true}
  ],
  "data": {
    "panel": ")" << out_dir << R"(/panel.csv",
    "metadata": ")" << out_dir << R"(/metadata.csv",
    "targets": ")" << out_dir << R"(/targets.csv",
    "targets_metadata": ")" << out_dir << R"(/targets_metadata.csv"
  }
})" << "\n";

    std::cout << "demo dataset written to " << out_dir << " (predictive series:";
    for (const auto& id : world.predictive_ids) std::cout << " " << id;
    std::cout << ")\n";
    return 0;
}
