#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bugrepro {

struct ProjectMeta {
    std::string name;
    int total_faults = 0;
    int faults_with_reports = 0;
};

struct BugReport {
    std::string project;
    std::string bug_id;
    std::string report_id; // canonical key: explicit report_id or the report URL
    std::string url;
    std::string title;
    std::string body; // report description only, no follow-ups or attachments

    std::string key() const { return project + ":" + bug_id; }
    bool empty_body() const;
};

// One dedup event: the kept report_id and the (project, bug_id) pairs whose
// records were dropped because they shared it.
struct DedupEntry {
    std::string report_id;
    std::vector<std::pair<std::string, std::string>> dropped;
};

// A non-fatal observation made while loading (malformed record, duplicate
// fault id, empty body, metadata mismatch).
struct CorpusFinding {
    enum class Severity { warning, error };
    Severity severity;
    int line = 0; // 0 when not tied to a line
    std::string code;
    std::string message;
};

struct Corpus {
    std::vector<ProjectMeta> projects;
    std::vector<BugReport> reports; // post-dedup, input order preserved
    std::vector<DedupEntry> dedup_log;
    std::vector<CorpusFinding> findings;

    bool has_errors() const;
};

struct ProjectCount {
    std::string project;
    int reports = 0;
};

// Loads, validates and deduplicates a line-delimited corpus file. Records
// failing validation become findings; they are reported, never silently
// dropped. Throws EmptyCorpus when no valid record remains. With `strict`,
// the first malformed record (or duplicate fault id) throws instead.
Corpus load_corpus(const std::filesystem::path& corpus_path,
                   const std::optional<std::filesystem::path>& project_meta_path = std::nullopt,
                   bool strict = false);

// Keeps the first occurrence of every report_id, in input order.
std::pair<std::vector<BugReport>, std::vector<DedupEntry>> dedup_reports(std::vector<BugReport> reports);

// Per-project report counts, sorted by project name; sums to |corpus.reports|.
std::vector<ProjectCount> corpus_stats(const Corpus& corpus);

} // namespace bugrepro
