#pragma once

#include <string>
#include <vector>

#include "sparsecast/report.hpp"

namespace sparsecast {

enum class ReportFormat { Csv, Markdown };

/// Write one file per table (RMSE, relative RMSE, DM/GW p-values, selection
/// frequency) into `out_dir`. Markdown bolds the row minimum; CSV carries raw
/// numbers at full precision. Column order and content are deterministic, so
/// identical inputs produce byte-identical files. Returns the paths written.
std::vector<std::string> emit_report(const EvaluationReport& report, const std::string& out_dir,
                                     const std::vector<ReportFormat>& formats);

}  // namespace sparsecast
