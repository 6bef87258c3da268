#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bugrepro/config.hpp"
#include "bugrepro/corpus.hpp"
#include "bugrepro/metrics.hpp"
#include "bugrepro/runstore.hpp"

namespace bugrepro {

// CLI exit-code contract.
enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_config = 2,
    exit_provider = 3,
    exit_adapter = 4,
};

int exit_code_for(const Error& e);

struct GenerateSummary {
    int samples_obtained = 0;
    int provider_errors = 0;
};

// Stage drivers. Each requires its predecessors to be complete (generate has
// none) and is independently resumable: existing artifacts are kept, missing
// ones are produced.
GenerateSummary stage_generate(RunManifest& manifest, const Config& cfg, const Corpus& corpus);
void stage_extract(RunManifest& manifest, const Config& cfg);
void stage_evaluate(RunManifest& manifest, const Config& cfg);
void stage_classify(RunManifest& manifest, const Config& cfg);
void stage_report(RunManifest& manifest, const Config& cfg);

// Loads the corpus for a run, failing on validation errors (warnings pass).
Corpus load_corpus_for_run(const Config& cfg);

// Reads back the report results produced by the classify stage.
std::vector<ReportResult> read_verdicts(const RunManifest& manifest);

// End-to-end: corpus -> generate -> extract -> evaluate -> classify -> report.
// Returns an ExitCode; a provider failure leaves a resumable partial run.
int run_pipeline(const Config& cfg);

// Runs one named stage against an existing run directory, using the
// configuration snapshot stored in its manifest.
int run_single_stage(const std::string& stage, const std::filesystem::path& run_dir);

} // namespace bugrepro
