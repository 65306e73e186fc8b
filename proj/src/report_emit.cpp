#include "sparsecast/report_emit.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sparsecast/errors.hpp"

namespace sparsecast {

namespace {

std::string full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string three_decimals(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string header_lines(const EvaluationReport& report) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "config_digest=%016llx data_digest=%016llx",
                  static_cast<unsigned long long>(report.config_digest),
                  static_cast<unsigned long long>(report.data_digest));
    return buf;
}

struct TableWriter {
    std::ofstream out;
    bool markdown;

    explicit TableWriter(const std::string& path, bool md) : out(path), markdown(md) {
        if (!out) throw IoError("cannot write report file " + path);
    }
};

// One RMSE-style block: rows are (horizon, period), columns are models; the
// row minimum is bolded in markdown.
void write_matrix(TableWriter& w, const EvaluationReport& report,
                  const std::vector<std::vector<std::vector<std::optional<double>>>>& values,
                  const std::string& title) {
    auto& out = w.out;
    if (w.markdown) {
        out << "# " << title << "\n\n<!-- " << header_lines(report) << " -->\n\n";
        out << "| horizon | period |";
        for (const auto& m : report.model_ids) out << " " << m << " |";
        out << "\n|---|---|";
        for (std::size_t i = 0; i < report.model_ids.size(); ++i) out << "---|";
        out << "\n";
    } else {
        out << "# " << header_lines(report) << "\n";
        out << "horizon,period";
        for (const auto& m : report.model_ids) out << "," << m;
        out << "\n";
    }

    for (std::size_t h = 0; h < report.horizons.size(); ++h) {
        for (std::size_t p = 0; p < report.periods.size(); ++p) {
            double row_min = 0.0;
            bool have_min = false;
            for (std::size_t m = 0; m < report.model_ids.size(); ++m) {
                const auto& cell = values[m][h][p];
                if (cell && (!have_min || *cell < row_min)) { row_min = *cell; have_min = true; }
            }

            if (w.markdown) {
                out << "| " << horizon_name(report.horizons[h]) << " | "
                    << report.periods[p].label << " |";
                for (std::size_t m = 0; m < report.model_ids.size(); ++m) {
                    const auto& cell = values[m][h][p];
                    if (!cell) { out << " --- |"; continue; }
                    const bool bold = have_min && *cell == row_min;
                    out << " " << (bold ? "**" : "") << three_decimals(*cell)
                        << (bold ? "**" : "") << " |";
                }
                out << "\n";
            } else {
                out << horizon_name(report.horizons[h]) << "," << report.periods[p].label;
                for (std::size_t m = 0; m < report.model_ids.size(); ++m) {
                    const auto& cell = values[m][h][p];
                    out << ",";
                    if (cell) out << full_precision(*cell);
                }
                out << "\n";
            }
        }
    }
}

void write_pairwise(TableWriter& w, const EvaluationReport& report,
                    const std::vector<std::vector<std::vector<std::optional<double>>>>& table,
                    const std::string& title) {
    auto& out = w.out;
    if (w.markdown) {
        out << "# " << title << "\n\n<!-- " << header_lines(report) << " -->\n\n";
    } else {
        out << "# " << header_lines(report) << "\n";
        out << "horizon,model_a,model_b,p_value\n";
    }
    for (std::size_t h = 0; h < report.horizons.size(); ++h) {
        if (w.markdown) {
            out << "## " << horizon_name(report.horizons[h]) << "\n\n| |";
            for (const auto& m : report.model_ids) out << " " << m << " |";
            out << "\n|---|";
            for (std::size_t i = 0; i < report.model_ids.size(); ++i) out << "---|";
            out << "\n";
        }
        for (std::size_t a = 0; a < report.model_ids.size(); ++a) {
            if (w.markdown) out << "| " << report.model_ids[a] << " |";
            for (std::size_t b = 0; b < report.model_ids.size(); ++b) {
                const std::optional<double> cell = a < b ? table[a][b][h] : std::nullopt;
                if (w.markdown) {
                    if (cell)
                        out << " " << three_decimals(*cell) << " |";
                    else
                        out << " - |";
                } else if (a < b && cell) {
                    out << horizon_name(report.horizons[h]) << "," << report.model_ids[a] << ","
                        << report.model_ids[b] << "," << full_precision(*cell) << "\n";
                }
            }
            if (w.markdown) out << "\n";
        }
        if (w.markdown) out << "\n";
    }
}

void write_selection(TableWriter& w, const EvaluationReport& report) {
    auto& out = w.out;
    if (w.markdown) {
        out << "# Selection frequency\n\n<!-- " << header_lines(report) << " -->\n\n";
        out << "| series | times selected |\n|---|---|\n";
        for (const auto& [id, count] : report.selection_counts)
            out << "| " << id << " | " << count << " |\n";
    } else {
        out << "# " << header_lines(report) << "\n";
        out << "series,times_selected\n";
        for (const auto& [id, count] : report.selection_counts)
            out << id << "," << count << "\n";
    }
}

}  // namespace

std::vector<std::string> emit_report(const EvaluationReport& report, const std::string& out_dir,
                                     const std::vector<ReportFormat>& formats) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;

    for (const ReportFormat format : formats) {
        const bool md = format == ReportFormat::Markdown;
        const std::string ext = md ? ".md" : ".csv";

        {
            const std::string path = out_dir + "/rmse" + ext;
            TableWriter w(path, md);
            write_matrix(w, report, report.rmse_by_split, "RMSE");
            written.push_back(path);
        }
        {
            const std::string path = out_dir + "/relative_rmse" + ext;
            TableWriter w(path, md);
            write_matrix(w, report, report.relative_rmse, "Relative RMSE (vs " +
                                                              report.benchmark_id + ")");
            written.push_back(path);
        }
        if (!report.dm_pvalues.empty()) {
            const std::string path = out_dir + "/dm_pvalues" + ext;
            TableWriter w(path, md);
            write_pairwise(w, report, report.dm_pvalues, "Diebold-Mariano p-values");
            written.push_back(path);
        }
        if (!report.gw_pvalues.empty()) {
            const std::string path = out_dir + "/gw_pvalues" + ext;
            TableWriter w(path, md);
            write_pairwise(w, report, report.gw_pvalues, "Giacomini-White p-values");
            written.push_back(path);
        }
        {
            const std::string path = out_dir + "/selection_frequency" + ext;
            TableWriter w(path, md);
            write_selection(w, report);
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace sparsecast
