#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bugrepro/config.hpp"

namespace bugrepro {

// Pipeline stages, in dependency order.
inline constexpr const char* kStages[] = {"generate", "extract", "evaluate", "classify", "report"};

struct StageState {
    bool complete = false;
    int attempt = 0; // attempts that produced the current derived artifacts
};

struct SampleErrorRecord {
    std::string code;
    std::string message;
};

// Per-sample artifact index. Paths are relative to the run directory; an
// empty string means the artifact does not exist (yet).
struct SampleEntry {
    int index = 0;
    std::string replay_key;
    nlohmann::ordered_json provider_meta; // null until generated
    std::optional<SampleErrorRecord> error;
    std::string raw;
    std::string extraction;
    std::string parsed;
    std::string compile_log;
    std::string test_log;
    std::string outcome;
};

struct ReportEntry {
    std::string project;
    std::string bug_id;
    std::string report_id;
    std::vector<SampleEntry> samples;
};

struct RunManifest {
    std::filesystem::path dir; // not serialized
    std::string run_id;        // timestamp + config/corpus digest
    std::string created_utc;
    std::string corpus_digest;
    nlohmann::ordered_json config_snapshot;
    std::map<std::string, StageState> stages;
    std::vector<ReportEntry> reports;
    std::vector<std::string> extra_artifacts; // run-level files (verdicts, reports, baselines)

    // Atomic write-rename; a crashed run never leaves a torn manifest.
    void save() const;
    static RunManifest load(const std::filesystem::path& dir);

    ReportEntry* find_report(const std::string& project, const std::string& bug_id);
    SampleEntry* find_sample(const std::string& project, const std::string& bug_id, int index);
    void add_extra_artifact(const std::string& rel_path);

    bool stage_complete(const std::string& stage) const;
    void mark_stage(const std::string& stage, bool complete);
};

// Relative artifact layout: <project>/<bug_id>/sample<k>/...
std::filesystem::path sample_rel_dir(const std::string& project, const std::string& bug_id, int index);

// Creates a fresh run directory (snapshotting config and corpus digest) or
// resumes an existing one. Resuming with a changed configuration or corpus
// throws ConfigMismatch.
RunManifest open_run(const std::filesystem::path& dir, const Config& cfg);

// Referential-integrity audit: every referenced artifact exists on disk and
// every artifact on disk is referenced. Scratch areas (dot-directories) and
// the manifest itself are outside the audit.
std::vector<std::string> verify_run(const std::filesystem::path& dir);

} // namespace bugrepro
