#include "bugrepro/corpus.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "bugrepro/errors.hpp"
#include "bugrepro/ioutil.hpp"

namespace bugrepro {

using nlohmann::json;

bool BugReport::empty_body() const {
    return trim(body).empty();
}

bool Corpus::has_errors() const {
    return std::any_of(findings.begin(), findings.end(),
                       [](const CorpusFinding& f) { return f.severity == CorpusFinding::Severity::error; });
}

static std::string get_string_field(const json& rec, const char* name) {
    auto it = rec.find(name);
    if (it == rec.end() || !it->is_string()) {
        return {};
    }
    return it->get<std::string>();
}

static std::vector<ProjectMeta> load_project_meta(const std::filesystem::path& path,
                                                  std::vector<CorpusFinding>& findings) {
    std::vector<ProjectMeta> metas;
    std::set<std::string> names;
    const std::string text = read_file(path);
    for_each_line(text, [&](int line_no, std::string_view line) {
        if (trim(line).empty()) {
            return;
        }
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            findings.push_back({CorpusFinding::Severity::error, line_no, "MalformedRecord",
                                std::string("project metadata: ") + e.what()});
            return;
        }
        ProjectMeta m;
        m.name = get_string_field(rec, "name");
        m.total_faults = rec.value("total_faults", 0);
        m.faults_with_reports = rec.value("faults_with_reports", 0);
        if (m.name.empty()) {
            findings.push_back({CorpusFinding::Severity::error, line_no, "MalformedRecord",
                                "project metadata record without a name"});
            return;
        }
        if (!names.insert(m.name).second) {
            findings.push_back({CorpusFinding::Severity::error, line_no, "DuplicateProject",
                                "project listed twice: " + m.name});
            return;
        }
        if (m.faults_with_reports > m.total_faults) {
            findings.push_back({CorpusFinding::Severity::error, line_no, "InvalidProjectMeta",
                                m.name + ": faults_with_reports exceeds total_faults"});
            return;
        }
        metas.push_back(std::move(m));
    });
    return metas;
}

std::pair<std::vector<BugReport>, std::vector<DedupEntry>> dedup_reports(std::vector<BugReport> reports) {
    std::vector<BugReport> kept;
    std::vector<DedupEntry> log;
    std::unordered_map<std::string, std::size_t> log_index; // report_id -> slot in log
    std::unordered_set<std::string> seen;
    kept.reserve(reports.size());
    for (auto& r : reports) {
        if (seen.insert(r.report_id).second) {
            kept.push_back(std::move(r));
            continue;
        }
        auto it = log_index.find(r.report_id);
        if (it == log_index.end()) {
            log.push_back({r.report_id, {}});
            it = log_index.emplace(r.report_id, log.size() - 1).first;
        }
        log[it->second].dropped.emplace_back(r.project, r.bug_id);
    }
    return {std::move(kept), std::move(log)};
}

Corpus load_corpus(const std::filesystem::path& corpus_path,
                   const std::optional<std::filesystem::path>& project_meta_path,
                   bool strict) {
    Corpus corpus;
    const std::string text = read_file(corpus_path);

    std::vector<BugReport> parsed;
    std::set<std::string> fault_keys;
    std::optional<MalformedRecord> strict_error;
    std::optional<DuplicateFaultId> strict_dup;

    for_each_line(text, [&](int line_no, std::string_view line) {
        if (strict_error || strict_dup) {
            return;
        }
        if (trim(line).empty()) {
            return;
        }
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            if (strict) {
                strict_error.emplace(line_no, e.what());
                return;
            }
            corpus.findings.push_back(
                {CorpusFinding::Severity::error, line_no, "MalformedRecord", e.what()});
            return;
        }
        BugReport r;
        r.project = get_string_field(rec, "project");
        r.bug_id = get_string_field(rec, "bug_id");
        r.url = get_string_field(rec, "url");
        r.title = get_string_field(rec, "title");
        r.body = get_string_field(rec, "body");
        r.report_id = get_string_field(rec, "report_id");
        if (r.report_id.empty()) {
            r.report_id = r.url; // fall back to the report URL
        }

        std::string cause;
        if (r.project.empty()) {
            cause = "missing project";
        } else if (r.bug_id.empty()) {
            cause = "missing bug_id";
        } else if (r.report_id.empty()) {
            cause = "missing report_id (no report_id or url field)";
        }
        if (!cause.empty()) {
            if (strict) {
                strict_error.emplace(line_no, cause);
                return;
            }
            corpus.findings.push_back({CorpusFinding::Severity::error, line_no, "MalformedRecord", cause});
            return;
        }
        if (!fault_keys.insert(r.key()).second) {
            if (strict) {
                strict_dup.emplace(r.project, r.bug_id);
                return;
            }
            corpus.findings.push_back({CorpusFinding::Severity::error, line_no, "DuplicateFaultId",
                                       "duplicate (project, bug_id): " + r.key()});
            return;
        }
        if (r.empty_body()) {
            corpus.findings.push_back({CorpusFinding::Severity::warning, line_no, "EmptyBody",
                                       r.key() + ": report body is empty; downstream stages still run it"});
        }
        parsed.push_back(std::move(r));
    });

    if (strict_error) {
        throw *strict_error;
    }
    if (strict_dup) {
        throw *strict_dup;
    }
    if (parsed.empty()) {
        throw EmptyCorpus("no valid records in " + corpus_path.string());
    }

    auto [kept, log] = dedup_reports(std::move(parsed));
    corpus.reports = std::move(kept);
    corpus.dedup_log = std::move(log);

    if (project_meta_path) {
        corpus.projects = load_project_meta(*project_meta_path, corpus.findings);
        std::set<std::string> known;
        for (const auto& m : corpus.projects) {
            known.insert(m.name);
        }
        // fault counts observed pre-dedup: one fault key per record
        std::map<std::string, int> observed;
        for (const auto& k : fault_keys) {
            observed[k.substr(0, k.find(':'))]++;
        }
        for (const auto& r : corpus.reports) {
            if (!known.count(r.project)) {
                corpus.findings.push_back({CorpusFinding::Severity::error, 0, "UnknownProject",
                                           r.key() + ": project not in metadata file"});
            }
        }
        for (const auto& m : corpus.projects) {
            auto it = observed.find(m.name);
            int got = it == observed.end() ? 0 : it->second;
            if (got != m.faults_with_reports) {
                corpus.findings.push_back(
                    {CorpusFinding::Severity::warning, 0, "MetaCountMismatch",
                     m.name + ": metadata says " + std::to_string(m.faults_with_reports) +
                         " faults with reports, corpus has " + std::to_string(got)});
            }
        }
    } else {
        // derive metadata from the reports themselves
        std::map<std::string, int> counts;
        for (const auto& k : fault_keys) {
            counts[k.substr(0, k.find(':'))]++;
        }
        for (const auto& [name, n] : counts) {
            corpus.projects.push_back({name, n, n});
        }
    }

    return corpus;
}

std::vector<ProjectCount> corpus_stats(const Corpus& corpus) {
    std::map<std::string, int> counts;
    for (const auto& r : corpus.reports) {
        counts[r.project]++;
    }
    std::vector<ProjectCount> rows;
    rows.reserve(counts.size());
    for (const auto& [name, n] : counts) {
        rows.push_back({name, n});
    }
    return rows;
}

} // namespace bugrepro
