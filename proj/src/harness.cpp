#include "bugrepro/harness.hpp"

#include <algorithm>
#include <chrono>
#include <regex>
#include <thread>

#include "bugrepro/digest.hpp"
#include "bugrepro/errors.hpp"
#include "bugrepro/ioutil.hpp"
#include "bugrepro/proc.hpp"

namespace bugrepro {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(RunStatus s) {
    switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::timed_out: return "timed_out";
    case RunStatus::infrastructure_error: return "infrastructure_error";
    }
    return "completed";
}

RunStatus run_status_from_string(const std::string& s) {
    if (s == "timed_out") return RunStatus::timed_out;
    if (s == "infrastructure_error") return RunStatus::infrastructure_error;
    if (s == "completed") return RunStatus::completed;
    throw Error("BadRecord", "unknown run status: " + s);
}

void to_json(ordered_json& j, const ExecutionOutcome& o) {
    j = ordered_json{{"compile", o.compile.ok ? "ok" : "failed"},
                     {"compile_log_excerpt", o.compile.log_excerpt},
                     {"run", to_string(o.run)},
                     {"run_log_excerpt", o.run_log_excerpt},
                     {"failing_tests", o.failing_tests},
                     {"failure_kinds", o.failure_kinds},
                     {"duration_s", o.duration_s},
                     {"attempts", o.attempts}};
}

void from_json(const json& j, ExecutionOutcome& o) {
    o.compile.ok = j.at("compile").get<std::string>() == "ok";
    o.compile.log_excerpt = j.value("compile_log_excerpt", "");
    o.run = run_status_from_string(j.at("run").get<std::string>());
    o.run_log_excerpt = j.value("run_log_excerpt", "");
    o.failing_tests = j.value("failing_tests", std::vector<std::string>{});
    o.failure_kinds = j.value("failure_kinds", std::map<std::string, std::string>{});
    o.duration_s = j.value("duration_s", 0.0);
    o.attempts = j.value("attempts", 1);
}

void to_json(ordered_json& j, const InjectionRecord& r) {
    j = ordered_json{{"file", r.file.generic_string()},
                     {"package", r.package_name},
                     {"class", r.class_simple_name},
                     {"qualified_class", r.class_qualified_name},
                     {"methods", r.methods},
                     {"renamed", r.renamed},
                     {"notes", r.notes}};
}

void from_json(const json& j, InjectionRecord& r) {
    r.file = fs::path(j.value("file", ""));
    r.package_name = j.value("package", "");
    r.class_simple_name = j.value("class", "");
    r.class_qualified_name = j.value("qualified_class", "");
    r.methods = j.value("methods", std::vector<std::string>{});
    r.renamed = j.value("renamed", false);
    r.notes = j.value("notes", std::vector<std::string>{});
}

std::vector<std::string> parse_defects4j_failing(const std::string& output) {
    std::vector<std::string> failing;
    bool in_block = false;
    static const std::regex entry_re(R"(^\s*-\s*(\S+)\s*$)");
    for_each_line(output, [&](int, std::string_view line) {
        const std::string s(line);
        if (s.rfind("Failing tests:", 0) == 0) {
            in_block = true;
            return;
        }
        if (!in_block) {
            return;
        }
        std::smatch m;
        if (std::regex_match(s, m, entry_re)) {
            failing.push_back(m[1].str());
        } else if (!trim(s).empty()) {
            in_block = false;
        }
    });
    return failing;
}

namespace {

std::string substitute_workspace(std::string tpl, const fs::path& root) {
    const std::string marker = "{workspace}";
    std::size_t pos;
    while ((pos = tpl.find(marker)) != std::string::npos) {
        tpl.replace(pos, marker.size(), root.string());
    }
    return tpl;
}

fs::path discover_test_root(const fs::path& root, const std::string& hint) {
    if (!hint.empty()) {
        return root / hint;
    }
    static const char* candidates[] = {"src/test/java", "src/test", "test", "tests", "src/tests"};
    for (const char* c : candidates) {
        if (fs::is_directory(root / c)) {
            return root / c;
        }
    }
    return root;
}

void write_log(const fs::path& path, const std::string& content) {
    write_file_atomic(path, content);
}

class ScriptedAdapter final : public Adapter {
public:
    explicit ScriptedAdapter(const AdapterSpec& spec) : spec_(spec) {
        if (spec.fixture.empty()) {
            throw ConfigError("scripted adapter requires adapter.fixture");
        }
        table_ = json::parse(read_file(spec.fixture));
    }

    void materialize(Workspace& ws) override {
        const std::string key = ws.project + ":" + ws.bug_id;
        if (!table_.contains("bugs") || !table_["bugs"].contains(key)) {
            throw CheckoutFailed("scripted fixture has no bug " + key);
        }
        const auto& bug = table_["bugs"][key];
        const std::string tsr = bug.value("test_source_root", "src/test/java");
        ws.test_source_root = ws.root / tsr;
        fs::create_directories(ws.test_source_root);
        const std::string pkg = bug.value("package", "");
        for (const auto& t : bug.value("existing_tests", json::array())) {
            const std::string rel = t.at("path").get<std::string>();
            const std::string cls = t.at("class").get<std::string>();
            std::string content;
            if (!pkg.empty()) {
                content += "package " + pkg + ";\n\n";
            }
            content += "public class " + cls + " {\n}\n";
            write_file(ws.test_source_root / rel, content);
        }
    }

    ExecutionOutcome compile_and_run(const Workspace& ws, const fs::path& compile_log,
                                     const fs::path& test_log) override {
        const std::string key = ws.project + ":" + ws.bug_id;
        if (!table_.contains("bugs") || !table_["bugs"].contains(key)) {
            throw InfrastructureError("scripted fixture has no bug " + key);
        }
        const auto& bug = table_["bugs"][key];

        if (!ws.injected_class_path) {
            // baseline: the unmodified buggy revision compiles and completes
            ExecutionOutcome out;
            out.compile.ok = true;
            out.run = RunStatus::completed;
            out.failing_tests = bug.value("baseline_failing_tests", std::vector<std::string>{});
            out.duration_s = 0.0;
            write_log(compile_log, "scripted baseline: compile ok\n");
            write_log(test_log, "scripted baseline run\n");
            return out;
        }

        const std::string digest = sha256_file(*ws.injected_class_path);
        if (!table_.contains("outcomes") || !table_["outcomes"].contains(digest)) {
            write_log(compile_log, "scripted: no outcome entry\n");
            write_log(test_log, "scripted: no outcome entry for digest " + digest + "\n");
            throw InfrastructureError("scripted outcome table has no entry for digest " + digest +
                                      " (" + key + ")");
        }
        const auto& entry = table_["outcomes"][digest];

        ExecutionOutcome out;
        out.compile.ok = entry.value("compile", "ok") == "ok";
        out.compile.log_excerpt = entry.value("compile_log", "");
        write_log(compile_log, out.compile.ok ? "scripted: compile ok\n"
                                              : "scripted: compile failed\n" + out.compile.log_excerpt + "\n");
        if (!out.compile.ok) {
            out.run = RunStatus::completed; // vacuous, nothing ran
            write_log(test_log, "scripted: suite not run (compile failed)\n");
            return out;
        }

        if (entry.value("hang", false)) {
            // simulate a never-ending suite: block until the timeout expires
            const auto start = std::chrono::steady_clock::now();
            std::this_thread::sleep_for(std::chrono::duration<double>(spec_.timeout_s));
            out.run = RunStatus::timed_out;
            out.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            out.run_log_excerpt = "suite execution killed at timeout";
            write_log(test_log, "scripted: suite never terminated; killed at timeout\n");
            return out;
        }

        out.run = run_status_from_string(entry.value("run", "completed"));
        out.duration_s = entry.value("duration_s", 0.0);
        out.run_log_excerpt = entry.value("run_log", "");
        if (out.run == RunStatus::completed) {
            out.failing_tests = entry.value("failing_tests", std::vector<std::string>{});
            out.failure_kinds = entry.value("failure_kinds", std::map<std::string, std::string>{});
        }
        write_log(test_log, "scripted suite run: " + to_string(out.run) + "\n");
        return out;
    }

private:
    AdapterSpec spec_;
    json table_;
};

class Defects4jAdapter final : public Adapter {
public:
    explicit Defects4jAdapter(const AdapterSpec& spec) : spec_(spec) {}

    void materialize(Workspace& ws) override {
        const std::string cmd = "defects4j checkout -p " + ws.project + " -v " + ws.bug_id + "b -w " +
                                ws.root.string();
        auto res = run_command(cmd, fs::path(), spec_.timeout_s);
        if (!res.start_ok || res.timed_out || res.exit_code != 0) {
            throw CheckoutFailed("defects4j checkout failed for " + ws.project + ":" + ws.bug_id + "\n" +
                                 tail_excerpt(res.output));
        }
        ws.test_source_root = export_test_root(ws.root);
    }

    ExecutionOutcome compile_and_run(const Workspace& ws, const fs::path& compile_log,
                                     const fs::path& test_log) override {
        ExecutionOutcome out;
        auto comp = run_command("defects4j compile", ws.root, spec_.timeout_s);
        write_log(compile_log, comp.output);
        if (!comp.start_ok) {
            throw InfrastructureError("cannot spawn defects4j compile: " + comp.error);
        }
        if (comp.timed_out) {
            out.compile = {false, "compile timed out after " + std::to_string(spec_.timeout_s) + " s"};
            write_log(test_log, "suite not run (compile timed out)\n");
            return out;
        }
        if (comp.exit_code != 0) {
            out.compile = {false, tail_excerpt(comp.output)};
            write_log(test_log, "suite not run (compile failed)\n");
            return out;
        }
        out.compile.ok = true;

        auto test = run_command("defects4j test", ws.root, spec_.timeout_s);
        write_log(test_log, test.output);
        out.duration_s = test.duration_s;
        if (!test.start_ok) {
            out.run = RunStatus::infrastructure_error;
            out.run_log_excerpt = "cannot spawn defects4j test: " + test.error;
            return out;
        }
        if (test.timed_out) {
            out.run = RunStatus::timed_out;
            out.run_log_excerpt = "suite execution killed at timeout";
            return out;
        }
        if (test.output.find("Failing tests:") == std::string::npos) {
            out.run = RunStatus::infrastructure_error;
            out.run_log_excerpt = "defects4j test produced no failing-test listing\n" +
                                  tail_excerpt(test.output);
            return out;
        }
        out.run = RunStatus::completed;
        out.failing_tests = parse_defects4j_failing(test.output);
        return out;
    }

private:
    fs::path export_test_root(const fs::path& root) {
        if (!spec_.test_source_root_hint.empty()) {
            return root / spec_.test_source_root_hint;
        }
        auto res = run_command("defects4j export -p dir.src.tests", root, spec_.timeout_s);
        if (res.start_ok && !res.timed_out && res.exit_code == 0) {
            std::string last;
            for_each_line(res.output, [&](int, std::string_view line) {
                if (!trim(line).empty()) {
                    last = trim(line);
                }
            });
            if (!last.empty() && fs::is_directory(root / last)) {
                return root / last;
            }
        }
        return discover_test_root(root, "");
    }

    AdapterSpec spec_;
};

class GenericCommandAdapter final : public Adapter {
public:
    explicit GenericCommandAdapter(const AdapterSpec& spec) : spec_(spec) {
        if (spec.compile_cmd.empty() || spec.test_cmd.empty()) {
            throw ConfigError("generic-command adapter requires compile and test command templates");
        }
        if (spec.failing_line_pattern.empty()) {
            throw ConfigError("generic-command adapter requires a failing-test line pattern");
        }
        failing_re_ = std::regex(spec.failing_line_pattern);
    }

    void materialize(Workspace& ws) override {
        if (!spec_.checkout_cmd.empty()) {
            auto res = run_command(substitute_workspace(spec_.checkout_cmd, ws.root), fs::path(),
                                   spec_.timeout_s);
            if (!res.start_ok || res.timed_out || res.exit_code != 0) {
                throw CheckoutFailed("checkout command failed for " + ws.project + ":" + ws.bug_id + "\n" +
                                     tail_excerpt(res.output));
            }
        } else if (!fs::is_directory(ws.root)) {
            throw CheckoutFailed("no checkout command and workspace does not exist: " + ws.root.string());
        }
        ws.test_source_root = discover_test_root(ws.root, spec_.test_source_root_hint);
    }

    ExecutionOutcome compile_and_run(const Workspace& ws, const fs::path& compile_log,
                                     const fs::path& test_log) override {
        ExecutionOutcome out;
        auto comp = run_command(substitute_workspace(spec_.compile_cmd, ws.root), ws.root, spec_.timeout_s);
        write_log(compile_log, comp.output);
        if (!comp.start_ok) {
            throw InfrastructureError("cannot spawn compile command: " + comp.error);
        }
        if (comp.timed_out || comp.exit_code != 0) {
            out.compile = {false, comp.timed_out ? "compile timed out" : tail_excerpt(comp.output)};
            write_log(test_log, "suite not run (compile failed)\n");
            return out;
        }
        out.compile.ok = true;

        auto test = run_command(substitute_workspace(spec_.test_cmd, ws.root), ws.root, spec_.timeout_s);
        write_log(test_log, test.output);
        out.duration_s = test.duration_s;
        if (!test.start_ok) {
            out.run = RunStatus::infrastructure_error;
            out.run_log_excerpt = "cannot spawn test command: " + test.error;
            return out;
        }
        if (test.timed_out) {
            out.run = RunStatus::timed_out;
            out.run_log_excerpt = "suite execution killed at timeout";
            return out;
        }
        // test runners conventionally exit 0 on success, 1 on test failures
        if (test.exit_code != 0 && test.exit_code != 1) {
            out.run = RunStatus::infrastructure_error;
            out.run_log_excerpt = "test command exit code " + std::to_string(test.exit_code) + "\n" +
                                  tail_excerpt(test.output);
            return out;
        }
        out.run = RunStatus::completed;
        for_each_line(test.output, [&](int, std::string_view line) {
            std::smatch m;
            const std::string s(line);
            if (std::regex_search(s, m, failing_re_) && m.size() > 1) {
                out.failing_tests.push_back(m[1].str());
            }
        });
        return out;
    }

private:
    AdapterSpec spec_;
    std::regex failing_re_;
};

} // namespace

std::unique_ptr<Adapter> make_adapter(const AdapterSpec& spec) {
    if (spec.timeout_s <= 0.0) {
        throw ConfigError("adapter timeout must be positive");
    }
    if (spec.kind == "scripted") {
        return std::make_unique<ScriptedAdapter>(spec);
    }
    if (spec.kind == "defects4j") {
        return std::make_unique<Defects4jAdapter>(spec);
    }
    if (spec.kind == "generic-command") {
        return std::make_unique<GenericCommandAdapter>(spec);
    }
    throw ConfigError("unknown adapter kind: " + spec.kind);
}

Workspace checkout(const std::string& project, const std::string& bug_id, Adapter& adapter,
                   const fs::path& root, const std::optional<std::vector<std::string>>& cached_baseline) {
    Workspace ws;
    ws.root = root;
    ws.project = project;
    ws.bug_id = bug_id;
    adapter.materialize(ws);

    if (cached_baseline) {
        ws.baseline_failing_tests = *cached_baseline;
        return ws;
    }

    const auto outcome = run_suite(ws, adapter, root / "baseline-compile.log", root / "baseline-test.log");
    if (!outcome.compile.ok) {
        throw BaselineCompileFailed(project + ":" + bug_id + ": " + outcome.compile.log_excerpt);
    }
    if (outcome.run == RunStatus::timed_out) {
        throw BaselineTimedOut(project + ":" + bug_id);
    }
    if (outcome.run == RunStatus::infrastructure_error) {
        throw InfrastructureError("baseline run failed: " + outcome.run_log_excerpt);
    }
    ws.baseline_failing_tests = outcome.failing_tests;
    return ws;
}

InjectionRecord inject_test(Workspace& ws, const ParsedTestCase& test, int sample_index,
                            bool rename_on_collision) {
    if (ws.injected_class_path) {
        throw Error("AlreadyInjected", "workspace already holds an injected test");
    }

    InjectionRecord rec;

    // placement package: the package of the lexicographically first existing
    // test class under the test source root
    std::vector<fs::path> existing;
    if (fs::is_directory(ws.test_source_root)) {
        for (const auto& e : fs::recursive_directory_iterator(ws.test_source_root)) {
            if (e.is_regular_file() && e.path().extension() == ".java") {
                existing.push_back(fs::relative(e.path(), ws.test_source_root));
            }
        }
    }
    std::sort(existing.begin(), existing.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });

    std::string pkg;
    if (!existing.empty()) {
        static const std::regex pkg_re(R"(^\s*package\s+([\w.]+)\s*;)");
        std::smatch m;
        const std::string first_content = read_file(ws.test_source_root / existing.front());
        if (std::regex_search(first_content, m, pkg_re)) {
            pkg = m[1].str();
        }
    }
    rec.package_name = pkg;

    fs::path target_dir = ws.test_source_root;
    if (!pkg.empty()) {
        std::string rel = pkg;
        std::replace(rel.begin(), rel.end(), '.', '/');
        target_dir /= rel;
    }

    std::string name = test.detected_class_name.value_or("GeneratedTest");
    std::string source = test.source_text;

    if (fs::exists(target_dir / (name + ".java"))) {
        if (!rename_on_collision) {
            throw InjectionCollision("class file " + name + ".java already exists and renaming is disabled");
        }
        const std::string renamed = name + "_g" + std::to_string(sample_index);
        if (fs::exists(target_dir / (renamed + ".java"))) {
            throw InjectionCollision("both " + name + ".java and " + renamed + ".java already exist");
        }
        if (test.detected_class_name) {
            const std::regex name_re("\\b" + name + "\\b");
            source = std::regex_replace(source, name_re, renamed);
        }
        rec.notes.push_back("class renamed to " + renamed + " due to file-name collision");
        rec.renamed = true;
        name = renamed;
    }

    // package-line rewrite: mechanical placement, not a content repair
    static const std::regex pkg_line_re(R"((^|\n)\s*package\s+[\w.]+\s*;[^\n]*)");
    std::smatch m;
    if (std::regex_search(source, m, pkg_line_re)) {
        if (pkg.empty()) {
            source = m.prefix().str() + m.suffix().str();
            rec.notes.push_back("package line removed to match default-package placement");
        } else {
            source = m.prefix().str() + m[1].str() + "package " + pkg + ";" + m.suffix().str();
            rec.notes.push_back("package line rewritten to " + pkg);
        }
    } else if (!pkg.empty()) {
        source = "package " + pkg + ";\n\n" + source;
        rec.notes.push_back("package line inserted for placement in " + pkg);
    }

    if (source.empty() || source.back() != '\n') {
        source.push_back('\n');
    }

    const fs::path target = target_dir / (name + ".java");
    write_file(target, source);

    ws.injected_class_path = target;
    rec.file = target;
    rec.class_simple_name = name;
    rec.class_qualified_name = pkg.empty() ? name : pkg + "." + name;
    rec.methods = test.detected_test_methods;
    return rec;
}

ExecutionOutcome run_suite(const Workspace& ws, Adapter& adapter, const fs::path& compile_log,
                           const fs::path& test_log) {
    auto ensure_logs = [&](const std::string& note) {
        for (const fs::path& p : {compile_log, test_log}) {
            if (!fs::exists(p)) {
                write_log(p, note);
            }
        }
    };
    try {
        auto outcome = adapter.compile_and_run(ws, compile_log, test_log);
        ensure_logs("(no output)\n");
        return outcome;
    } catch (const std::exception& e) {
        ensure_logs(std::string("adapter error: ") + e.what() + "\n");
        throw;
    }
}

} // namespace bugrepro
