#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bugrepro/extraction.hpp"

namespace bugrepro {

struct Workspace {
    std::filesystem::path root;
    std::string project;
    std::string bug_id;
    std::filesystem::path test_source_root;
    std::optional<std::filesystem::path> injected_class_path;
    std::vector<std::string> baseline_failing_tests; // recorded before any injection
};

struct AdapterSpec {
    std::string kind = "scripted"; // defects4j | generic-command | scripted
    // generic-command templates; {workspace} is substituted
    std::string checkout_cmd;
    std::string compile_cmd;
    std::string test_cmd;
    std::string failing_line_pattern; // regex, capture group 1 = qualified test name
    double timeout_s = 1800.0;        // per suite execution, wall clock
    double grace_s = 10.0;
    std::filesystem::path fixture;    // scripted: outcome table file
    std::string test_source_root_hint;
    bool rename_on_collision = true;
};

struct CompileStatus {
    bool ok = false;
    std::string log_excerpt;
};

enum class RunStatus { completed, timed_out, infrastructure_error };

std::string to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);

struct ExecutionOutcome {
    CompileStatus compile;
    RunStatus run = RunStatus::completed;
    std::string run_log_excerpt;
    std::vector<std::string> failing_tests;            // completed runs only
    std::map<std::string, std::string> failure_kinds;  // optional: name -> assertion|error
    double duration_s = 0.0;
    int attempts = 1;
};

struct InjectionRecord {
    std::filesystem::path file;
    std::string package_name;
    std::string class_simple_name;
    std::string class_qualified_name;
    std::vector<std::string> methods;
    bool renamed = false;
    std::vector<std::string> notes;
};

class Adapter {
public:
    virtual ~Adapter() = default;
    // Materializes the buggy revision under ws.root and sets test_source_root.
    virtual void materialize(Workspace& ws) = 0;
    // Compile step then full suite run under the spec timeout. Logs are
    // written to the given paths.
    virtual ExecutionOutcome compile_and_run(const Workspace& ws,
                                             const std::filesystem::path& compile_log,
                                             const std::filesystem::path& test_log) = 0;
};

std::unique_ptr<Adapter> make_adapter(const AdapterSpec& spec);

// Materializes a workspace for (project, bug_id) at `root` and records the
// baseline failing tests from one unmodified suite run (skipped when a cached
// baseline is supplied).
Workspace checkout(const std::string& project, const std::string& bug_id, Adapter& adapter,
                   const std::filesystem::path& root,
                   const std::optional<std::vector<std::string>>& cached_baseline = std::nullopt);

// Writes the parsed unit as a new file under the workspace test source root.
// The package line is rewritten to the placement package (the package of the
// lexicographically first existing test class); the class is renamed with a
// _g<sample> suffix only on a file-name collision. Nothing else is touched.
InjectionRecord inject_test(Workspace& ws, const ParsedTestCase& test, int sample_index,
                            bool rename_on_collision = true);

// Compile + full-suite run through the adapter. Both log files exist on disk
// when this returns, including on error paths.
ExecutionOutcome run_suite(const Workspace& ws, Adapter& adapter,
                           const std::filesystem::path& compile_log,
                           const std::filesystem::path& test_log);

// Parses "Failing tests:" blocks as emitted by the Defects4J pipeline.
std::vector<std::string> parse_defects4j_failing(const std::string& output);

void to_json(nlohmann::ordered_json& j, const ExecutionOutcome& o);
void from_json(const nlohmann::json& j, ExecutionOutcome& o);
void to_json(nlohmann::ordered_json& j, const InjectionRecord& r);
void from_json(const nlohmann::json& j, InjectionRecord& r);

} // namespace bugrepro
