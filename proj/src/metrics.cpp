#include "bugrepro/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bugrepro/errors.hpp"

namespace bugrepro {

using nlohmann::json;
using nlohmann::ordered_json;

int percent(int n, int d) {
    // round half up, integer arithmetic
    return (200 * n + d) / (2 * d);
}

static void fill_percentages(ProjectRow& row) {
    row.pct_executability = percent(row.n_any_executable, row.n_reports);
    row.pct_validity = percent(row.n_any_valid, row.n_reports);
    row.pct_valid_among_executable =
        row.n_any_executable > 0 ? percent(row.n_any_valid, row.n_any_executable) : 0;
}

static ProjectRow total_of(const std::vector<ProjectRow>& rows) {
    ProjectRow total;
    total.project = "Total";
    for (const auto& r : rows) {
        total.n_reports += r.n_reports;
        total.n_any_executable += r.n_any_executable;
        total.n_any_valid += r.n_any_valid;
        total.n_undetermined += r.n_undetermined;
    }
    if (total.n_reports > 0) {
        fill_percentages(total);
    }
    return total;
}

MetricsTable aggregate_metrics(const std::vector<ReportResult>& results, const Corpus& corpus) {
    std::set<std::string> known;
    for (const auto& p : corpus.projects) {
        known.insert(p.name);
    }
    std::map<std::string, ProjectRow> by_project; // ordered: alphabetical rows
    for (const auto& res : results) {
        if (!known.count(res.project)) {
            throw MissingProject(res.project + ":" + res.bug_id + " not present in corpus");
        }
        ProjectRow& row = by_project[res.project];
        row.project = res.project;
        row.n_reports++;
        if (res.any_executable) {
            row.n_any_executable++;
        }
        if (res.any_valid) {
            row.n_any_valid++;
        }
        if (res.undetermined) {
            row.n_undetermined++;
        }
    }

    MetricsTable table;
    for (auto& [name, row] : by_project) {
        if (row.n_reports == 0) {
            continue; // division undefined; row omitted
        }
        fill_percentages(row);
        table.rows.push_back(row);
    }
    table.total = total_of(table.rows);
    return table;
}

MetricsTable merge_tables(const MetricsTable& a, const MetricsTable& b) {
    std::map<std::string, ProjectRow> by_project;
    for (const auto& src : {a.rows, b.rows}) {
        for (const auto& r : src) {
            ProjectRow& row = by_project[r.project];
            row.project = r.project;
            row.n_reports += r.n_reports;
            row.n_any_executable += r.n_any_executable;
            row.n_any_valid += r.n_any_valid;
            row.n_undetermined += r.n_undetermined;
        }
    }
    MetricsTable merged;
    for (auto& [name, row] : by_project) {
        fill_percentages(row);
        merged.rows.push_back(row);
    }
    merged.total = total_of(merged.rows);
    return merged;
}

static void render_csv_row(std::ostringstream& out, const ProjectRow& r) {
    out << r.project << ',' << r.n_reports << ',' << r.pct_executability << ',' << r.pct_validity << ','
        << r.pct_valid_among_executable << ',' << r.n_undetermined << '\n';
}

static ordered_json row_to_json(const ProjectRow& r) {
    return ordered_json{{"project", r.project},
                        {"n_reports", r.n_reports},
                        {"n_any_executable", r.n_any_executable},
                        {"n_any_valid", r.n_any_valid},
                        {"n_undetermined", r.n_undetermined},
                        {"pct_executability", r.pct_executability},
                        {"pct_validity", r.pct_validity},
                        {"pct_valid_among_executable", r.pct_valid_among_executable}};
}

static ProjectRow row_from_json(const json& j) {
    ProjectRow r;
    r.project = j.at("project").get<std::string>();
    r.n_reports = j.at("n_reports").get<int>();
    r.n_any_executable = j.at("n_any_executable").get<int>();
    r.n_any_valid = j.at("n_any_valid").get<int>();
    r.n_undetermined = j.at("n_undetermined").get<int>();
    r.pct_executability = j.at("pct_executability").get<int>();
    r.pct_validity = j.at("pct_validity").get<int>();
    r.pct_valid_among_executable = j.at("pct_valid_among_executable").get<int>();
    return r;
}

std::string render_report(const MetricsTable& table, ReportFormat format) {
    switch (format) {
    case ReportFormat::csv: {
        std::ostringstream out;
        out << "project,n_reports,exec_pct,valid_pct,valid_among_exec_pct,n_undetermined\n";
        for (const auto& r : table.rows) {
            render_csv_row(out, r);
        }
        render_csv_row(out, table.total);
        return out.str();
    }
    case ReportFormat::markdown: {
        std::ostringstream out;
        out << "| Project | # of bug reports | overall executability | overall validity | "
               "validity among executable | undetermined |\n";
        out << "|---|---|---|---|---|---|\n";
        auto line = [&](const ProjectRow& r) {
            out << "| " << r.project << " | " << r.n_reports << " | " << r.pct_executability << "% | "
                << r.pct_validity << "% | " << r.pct_valid_among_executable << "% | " << r.n_undetermined
                << " |\n";
        };
        for (const auto& r : table.rows) {
            line(r);
        }
        line(table.total);
        return out.str();
    }
    case ReportFormat::structured: {
        ordered_json j;
        j["rows"] = ordered_json::array();
        for (const auto& r : table.rows) {
            j["rows"].push_back(row_to_json(r));
        }
        j["total"] = row_to_json(table.total);
        return j.dump(2) + "\n";
    }
    }
    throw Error("BadFormat", "unknown report format");
}

MetricsTable parse_structured(const std::string& text) {
    const json j = json::parse(text);
    MetricsTable table;
    for (const auto& r : j.at("rows")) {
        table.rows.push_back(row_from_json(r));
    }
    table.total = row_from_json(j.at("total"));
    return table;
}

std::vector<ConsistencyFinding> consistency_check(const MetricsTable& table, int slack_pp) {
    std::vector<ConsistencyFinding> findings;
    auto check_row = [&](const ProjectRow& r) {
        if (r.n_any_valid > r.n_any_executable) {
            findings.push_back({r.project, "n_any_valid (" + std::to_string(r.n_any_valid) +
                                               ") exceeds n_any_executable (" +
                                               std::to_string(r.n_any_executable) + ")"});
        }
        if (r.n_any_executable > r.n_reports) {
            findings.push_back({r.project, "n_any_executable (" + std::to_string(r.n_any_executable) +
                                               ") exceeds n_reports (" + std::to_string(r.n_reports) + ")"});
        }
        if (r.n_any_executable > 0) {
            const int expected = percent(r.n_any_valid, r.n_any_executable);
            if (std::abs(expected - r.pct_valid_among_executable) > slack_pp) {
                findings.push_back(
                    {r.project, "valid-among-executable is " + std::to_string(r.pct_valid_among_executable) +
                                    "% but counts give " + std::to_string(expected) + "%"});
            }
        }
    };
    for (const auto& r : table.rows) {
        check_row(r);
    }
    check_row(table.total);
    return findings;
}

} // namespace bugrepro
