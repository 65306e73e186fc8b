#include "sparsecast/panel_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sparsecast/errors.hpp"

namespace sparsecast {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool is_quarter_label(const std::string& s) { return s.find('Q') != std::string::npos; }

}  // namespace

std::vector<SeriesMetadata> read_metadata(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open metadata file " + path);

    std::vector<SeriesMetadata> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("id,", 0) == 0) continue;  // header
        const auto fields = split_csv_line(line);
        if (fields.size() < 3) throw ParseError("metadata row needs id,lag,sa_flag", line_no);
        SeriesMetadata meta;
        meta.id = fields[0];
        try {
            meta.release_lag_months = std::stoi(fields[1]);
        } catch (...) {
            throw ParseError("bad release lag '" + fields[1] + "'", line_no);
        }
        if (meta.release_lag_months < 0 || meta.release_lag_months > 12)
            throw ParseError("release lag out of [0, 12]", line_no);
        meta.sa_flag = fields[2] == "1" || fields[2] == "true";
        if (fields.size() > 3 && !fields[3].empty()) meta.transform_hint = fields[3];
        if (fields.size() > 4) meta.source_tag = fields[4];
        out.push_back(std::move(meta));
    }
    return out;
}

Dataset ingest_panel(const std::string& data_path, const std::string& metadata_path,
                     IngestReport* report) {
    const auto metadata = read_metadata(metadata_path);
    std::map<std::string, SeriesMetadata> meta_by_id;
    for (const auto& m : metadata) meta_by_id[m.id] = m;

    std::ifstream in(data_path);
    if (!in) throw IoError("cannot open panel file " + data_path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty panel file", 1);
    auto header = split_csv_line(line);
    if (header.size() < 2) throw ParseError("panel needs a date column and one series", 1);

    const std::vector<std::string> ids(header.begin() + 1, header.end());
    for (const auto& id : ids)
        if (!meta_by_id.count(id)) throw MissingMetadataError(id);

    std::vector<std::string> dates;
    std::vector<std::vector<std::optional<double>>> cells(ids.size());
    std::set<std::string> seen_dates;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(header.size()),
                             line_no);
        if (!seen_dates.insert(fields[0]).second)
            throw DuplicateDateError("duplicate date " + fields[0]);
        dates.push_back(fields[0]);
        for (std::size_t j = 0; j < ids.size(); ++j) {
            const std::string& cell = fields[j + 1];
            if (cell.empty()) {
                cells[j].push_back(std::nullopt);
                continue;
            }
            double value = 0.0;
            const auto result = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (result.ec != std::errc() || result.ptr != cell.data() + cell.size())
                throw ParseError("bad number '" + cell + "'", line_no);
            cells[j].push_back(value);
        }
    }
    if (dates.empty()) throw ParseError("panel has no data rows", line_no);

    const bool quarterly = is_quarter_label(dates[0]);

    Dataset dataset;
    for (std::size_t j = 0; j < ids.size(); ++j) {
        TimeSeries series;
        series.id = ids[j];
        const auto& meta = meta_by_id[ids[j]];
        series.release_lag_months = meta.release_lag_months;
        series.sa_flag = meta.sa_flag;
        if (meta.transform_hint) series.transform_hint = *meta.transform_hint;
        series.frequency = quarterly ? Frequency::Quarterly : Frequency::Monthly;

        const Month axis_start =
            quarterly ? Quarter::parse(dates[0]).first_month() : Month::parse(dates[0]);
        const int step = quarterly ? 3 : 1;
        for (std::size_t t = 0; t < dates.size(); ++t) {
            // contiguity of the stored dates
            const Month expected = axis_start + step * static_cast<int>(t);
            const Month actual =
                quarterly ? Quarter::parse(dates[t]).first_month() : Month::parse(dates[t]);
            if (actual != expected)
                throw ParseError("dates not contiguous at " + dates[t], static_cast<int>(t) + 2);
        }

        // A series may start after the panel does and end before it (the
        // ragged edge); interior gaps are malformed data.
        bool started = false;
        bool edge_reached = false;
        for (std::size_t t = 0; t < dates.size(); ++t) {
            if (!cells[j][t].has_value()) {
                if (started) edge_reached = true;
                continue;
            }
            if (edge_reached)
                throw ParseError("interior gap in series " + ids[j] + " at " + dates[t],
                                 static_cast<int>(t) + 2);
            if (!started) {
                started = true;
                series.start = axis_start + step * static_cast<int>(t);
            }
            series.values.push_back(*cells[j][t]);
        }
        if (series.values.empty()) {
            if (report) report->warnings.push_back("series " + ids[j] + " is empty");
            continue;
        }
        if (meta.transform_hint && *meta.transform_hint == "log") {
            for (double v : series.values)
                if (v <= 0.0 && report) {
                    report->warnings.push_back("series " + ids[j] +
                                               " hinted log but has non-positive values");
                    break;
                }
        }
        if (quarterly)
            dataset.targets.push_back(std::move(series));
        else
            dataset.monthly.push_back(std::move(series));
    }
    return dataset;
}

void write_panel(const Dataset& dataset, const std::string& data_path,
                 const std::string& metadata_path) {
    const auto& list = dataset.monthly.empty() ? dataset.targets : dataset.monthly;
    if (list.empty()) throw ValidationError("write_panel: empty dataset");
    const bool quarterly = list.front().frequency == Frequency::Quarterly;

    // common axis across the series
    Month first = list.front().start;
    Month last = list.front().last_month();
    for (const auto& s : list) {
        if (s.start < first) first = s.start;
        const Month end = quarterly ? s.start + 3 * (s.size() - 1) : s.last_month();
        if (end > last) last = end;
    }

    std::ofstream out(data_path);
    if (!out) throw IoError("cannot write panel file " + data_path);
    out << "date";
    for (const auto& s : list) out << "," << s.id;
    out << "\n";

    const int step = quarterly ? 3 : 1;
    for (Month m = first; m <= last; m = m + step) {
        out << (quarterly ? quarter_of(m).str() : m.str());
        for (const auto& s : list) {
            const int idx = (m - s.start) / step;
            out << ",";
            if (idx >= 0 && idx < s.size()) out << format_double(s.values[idx]);
        }
        out << "\n";
    }

    std::ofstream meta(metadata_path);
    if (!meta) throw IoError("cannot write metadata file " + metadata_path);
    meta << "id,release_lag_months,sa_flag,transform_hint,source_tag\n";
    for (const auto& s : list)
        meta << s.id << "," << s.release_lag_months << "," << (s.sa_flag ? 1 : 0) << ","
             << s.transform_hint << ",\n";
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ValidationError("config: unknown key '" + it.key() + "' in " + where);
}

Variant variant_from_string(const std::string& s) {
    if (s == "lasso") return Variant::Lasso;
    if (s == "sqrt") return Variant::SqrtLasso;
    if (s == "adaptive") return Variant::Adaptive;
    if (s == "relaxed") return Variant::Relaxed;
    if (s == "pca") return Variant::PcaLasso;
    if (s == "adapcax") return Variant::AdaPcaX;
    throw ValidationError("config: unknown model variant '" + s + "'");
}

}  // namespace

LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path);
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config: bad JSON: ") + e.what());
    }

    reject_unknown_keys(doc, {"schema_version", "target_id", "window_mode", "window_years",
                              "train_start", "eval_start", "eval_end", "models", "seed",
                              "parallelism", "max_lag_quarters", "min_overlap_quarters",
                              "cv_holdout_quarters", "cv_lambda_grid", "fill_method",
                              "fill_max_p", "fill_max_q", "benchmark_max_p", "benchmark_max_q",
                              "pp_bootstrap_reps", "splits", "data", "prepare_panel",
                              "fetch_api_key_env"},
                        "top level");

    if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != 1)
        throw ValidationError("config: schema_version must be 1");

    LoadedConfig loaded;
    RunConfig& run = loaded.run;
    run.target_id = doc.at("target_id").get<std::string>();
    if (doc.contains("window_mode")) {
        const std::string mode = doc["window_mode"].get<std::string>();
        if (mode == "expanding") run.window_mode = WindowMode::Expanding;
        else if (mode == "rolling") run.window_mode = WindowMode::Rolling;
        else throw ValidationError("config: window_mode must be expanding|rolling");
    }
    if (doc.contains("window_years")) run.window_years = doc["window_years"].get<int>();
    if (doc.contains("train_start")) run.train_start = Quarter::parse(doc["train_start"].get<std::string>());
    if (doc.contains("eval_start")) run.eval_start = Quarter::parse(doc["eval_start"].get<std::string>());
    if (doc.contains("eval_end")) run.eval_end = Quarter::parse(doc["eval_end"].get<std::string>());
    run.seed = doc.at("seed").get<std::uint64_t>();
    if (run.seed == 0) throw ValidationError("config: seed must be nonzero");
    if (doc.contains("parallelism")) run.parallelism = doc["parallelism"].get<int>();
    if (doc.contains("max_lag_quarters")) run.max_lag_quarters = doc["max_lag_quarters"].get<int>();
    if (doc.contains("min_overlap_quarters"))
        run.min_overlap_quarters = doc["min_overlap_quarters"].get<int>();
    if (doc.contains("cv_holdout_quarters"))
        run.cv_holdout_quarters = doc["cv_holdout_quarters"].get<int>();
    if (doc.contains("cv_lambda_grid")) run.cv_lambda_grid = doc["cv_lambda_grid"].get<int>();
    if (doc.contains("fill_method")) {
        const std::string method = doc["fill_method"].get<std::string>();
        if (method == "arma") run.fill_method = FillMethod::Arma;
        else if (method == "holt_winters") run.fill_method = FillMethod::HoltWinters;
        else throw ValidationError("config: fill_method must be arma|holt_winters");
    }
    if (doc.contains("fill_max_p")) run.fill_max_p = doc["fill_max_p"].get<int>();
    if (doc.contains("fill_max_q")) run.fill_max_q = doc["fill_max_q"].get<int>();
    if (doc.contains("benchmark_max_p")) run.benchmark_max_p = doc["benchmark_max_p"].get<int>();
    if (doc.contains("benchmark_max_q")) run.benchmark_max_q = doc["benchmark_max_q"].get<int>();
    if (doc.contains("pp_bootstrap_reps"))
        run.pp_bootstrap_reps = doc["pp_bootstrap_reps"].get<int>();

    if (doc.contains("splits")) {
        for (const auto& s : doc["splits"]) {
            reject_unknown_keys(s, {"label", "first", "last"}, "splits");
            run.splits.push_back({s.at("label").get<std::string>(),
                                  Quarter::parse(s.at("first").get<std::string>()),
                                  Quarter::parse(s.at("last").get<std::string>())});
        }
    }

    for (const auto& m : doc.at("models")) {
        reject_unknown_keys(m, {"id", "variant", "benchmark", "fixed_k", "gamma", "phi_grid",
                                "fixed_lambda"},
                            "models");
        ModelSpec spec;
        spec.id = m.at("id").get<std::string>();
        if (m.contains("benchmark") && m["benchmark"].get<bool>()) {
            spec.is_arma_benchmark = true;
        } else {
            spec.variant = variant_from_string(m.at("variant").get<std::string>());
        }
        if (m.contains("fixed_k")) spec.fixed_k = m["fixed_k"].get<int>();
        if (m.contains("gamma")) spec.gamma = m["gamma"].get<double>();
        if (m.contains("phi_grid"))
            for (const auto& phi : m["phi_grid"]) spec.phi_grid.push_back(phi.get<double>());
        if (m.contains("fixed_lambda")) spec.fixed_lambda = m["fixed_lambda"].get<double>();
        run.models.push_back(std::move(spec));
    }

    if (doc.contains("data")) {
        const auto& data = doc["data"];
        reject_unknown_keys(data, {"panel", "metadata", "targets", "targets_metadata"}, "data");
        if (data.contains("panel")) loaded.panel_path = data["panel"].get<std::string>();
        if (data.contains("metadata")) loaded.metadata_path = data["metadata"].get<std::string>();
        if (data.contains("targets")) loaded.targets_path = data["targets"].get<std::string>();
        if (data.contains("targets_metadata"))
            loaded.targets_metadata_path = data["targets_metadata"].get<std::string>();
    }
    if (doc.contains("prepare_panel")) loaded.prepare_panel = doc["prepare_panel"].get<bool>();
    if (doc.contains("fetch_api_key_env"))
        loaded.fetch_api_key_env = doc["fetch_api_key_env"].get<std::string>();

    run.validate();
    return loaded;
}

Dataset LoadedConfig::load_dataset(IngestReport* report) const {
    if (panel_path.empty() || metadata_path.empty())
        throw ValidationError("config: data.panel and data.metadata are required to run");
    Dataset dataset = ingest_panel(panel_path, metadata_path, report);
    if (!targets_path.empty()) {
        const std::string meta = targets_metadata_path.empty() ? metadata_path
                                                               : targets_metadata_path;
        Dataset targets = ingest_panel(targets_path, meta, report);
        for (auto& t : targets.targets) dataset.targets.push_back(std::move(t));
        for (auto& m : targets.monthly) dataset.monthly.push_back(std::move(m));
    }
    return dataset;
}

void write_records(const std::vector<ForecastRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write record store " + path);
    out << "target_id,origin,horizon,model_id,point,realized,failed,active_columns\n";
    for (const auto& r : records) {
        out << r.target_id << "," << r.origin.str() << "," << horizon_name(r.horizon) << ","
            << r.model_id << ",";
        if (r.point) out << format_double(*r.point);
        out << ",";
        if (r.realized) out << format_double(*r.realized);
        out << "," << (r.failed ? 1 : 0) << ",";
        for (std::size_t i = 0; i < r.active_columns.size(); ++i) {
            if (i) out << ";";
            out << r.active_columns[i].series_id << ":" << r.active_columns[i].lag;
        }
        out << "\n";
    }
}

std::vector<ForecastRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open record store " + path);

    std::string line;
    if (!std::getline(in, line) ||
        line != "target_id,origin,horizon,model_id,point,realized,failed,active_columns")
        throw ParseError("record store header mismatch", 1);

    std::vector<ForecastRecord> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 8) throw ParseError("record row needs 8 fields", line_no);
        ForecastRecord r;
        r.target_id = fields[0];
        r.origin = Quarter::parse(fields[1]);
        r.horizon = horizon_from_name(fields[2]);
        r.model_id = fields[3];
        if (!fields[4].empty()) r.point = std::stod(fields[4]);
        if (!fields[5].empty()) r.realized = std::stod(fields[5]);
        r.failed = fields[6] == "1";
        if (!fields[7].empty()) {
            std::stringstream ss(fields[7]);
            std::string token;
            while (std::getline(ss, token, ';')) {
                const auto colon = token.rfind(':');
                if (colon == std::string::npos) throw ParseError("bad active column", line_no);
                r.active_columns.push_back(
                    {token.substr(0, colon), std::stoi(token.substr(colon + 1))});
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace sparsecast
