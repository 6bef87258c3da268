#pragma once

#include <string>
#include <vector>

#include "bugrepro/classification.hpp"
#include "bugrepro/corpus.hpp"

namespace bugrepro {

struct ProjectRow {
    std::string project;
    int n_reports = 0;
    int n_any_executable = 0;
    int n_any_valid = 0;
    int n_undetermined = 0;
    int pct_executability = 0;          // round(100 * n_any_executable / n_reports)
    int pct_validity = 0;               // round(100 * n_any_valid / n_reports)
    int pct_valid_among_executable = 0; // round(100 * n_any_valid / n_any_executable)
};

struct MetricsTable {
    std::vector<ProjectRow> rows;
    ProjectRow total; // project = "Total"; percentages recomputed from summed counts
};

struct ConsistencyFinding {
    std::string project;
    std::string message;
};

enum class ReportFormat { csv, markdown, structured };

// Integer percent, round half up. d must be > 0.
int percent(int n, int d);

// Folds report results into per-project rows (alphabetical project order,
// zero-report projects omitted) plus a total row recomputed from summed
// counts. Undetermined reports count as executable, never as valid. Throws
// MissingProject for a result whose project is not in the corpus.
MetricsTable aggregate_metrics(const std::vector<ReportResult>& results, const Corpus& corpus);

// Count-wise merge of partial tables (aggregation is a monoid fold).
MetricsTable merge_tables(const MetricsTable& a, const MetricsTable& b);

std::string render_report(const MetricsTable& table, ReportFormat format);

// Inverse of render_report(..., structured).
MetricsTable parse_structured(const std::string& text);

// Flags rows whose valid-among-executable column deviates from its counts by
// more than `slack_pp` percentage points, and any row with valid > executable.
std::vector<ConsistencyFinding> consistency_check(const MetricsTable& table, int slack_pp = 0);

} // namespace bugrepro
