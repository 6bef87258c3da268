#include "bugrepro/runstore.hpp"

#include <algorithm>
#include <set>

#include "bugrepro/digest.hpp"
#include "bugrepro/errors.hpp"
#include "bugrepro/ioutil.hpp"

namespace bugrepro {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json sample_to_json(const SampleEntry& s) {
    ordered_json j;
    j["index"] = s.index;
    j["replay_key"] = s.replay_key;
    j["provider_meta"] = s.provider_meta.is_null() ? ordered_json() : s.provider_meta;
    if (s.error) {
        j["error"] = ordered_json{{"code", s.error->code}, {"message", s.error->message}};
    } else {
        j["error"] = nullptr;
    }
    j["raw"] = s.raw;
    j["extraction"] = s.extraction;
    j["parsed"] = s.parsed;
    j["compile_log"] = s.compile_log;
    j["test_log"] = s.test_log;
    j["outcome"] = s.outcome;
    return j;
}

SampleEntry sample_from_json(const json& j) {
    SampleEntry s;
    s.index = j.at("index").get<int>();
    s.replay_key = j.value("replay_key", "");
    if (j.contains("provider_meta") && !j["provider_meta"].is_null()) {
        s.provider_meta = j["provider_meta"];
    }
    if (j.contains("error") && !j["error"].is_null()) {
        s.error = SampleErrorRecord{j["error"].value("code", ""), j["error"].value("message", "")};
    }
    s.raw = j.value("raw", "");
    s.extraction = j.value("extraction", "");
    s.parsed = j.value("parsed", "");
    s.compile_log = j.value("compile_log", "");
    s.test_log = j.value("test_log", "");
    s.outcome = j.value("outcome", "");
    return s;
}

// Config comparison for resume: identity of the experiment, not of the output
// location. Workers and directory placement may change between resumes.
ordered_json comparable_config(const ordered_json& snapshot) {
    ordered_json c = snapshot;
    c.erase("workers");
    c.erase("run_dir");
    c.erase("workspaces_dir");
    c.erase("corpus");   // covered by the corpus digest
    c.erase("projects");
    return c;
}

} // namespace

fs::path sample_rel_dir(const std::string& project, const std::string& bug_id, int index) {
    return fs::path(project) / bug_id / ("sample" + std::to_string(index));
}

ReportEntry* RunManifest::find_report(const std::string& project, const std::string& bug_id) {
    for (auto& r : reports) {
        if (r.project == project && r.bug_id == bug_id) {
            return &r;
        }
    }
    return nullptr;
}

SampleEntry* RunManifest::find_sample(const std::string& project, const std::string& bug_id, int index) {
    ReportEntry* r = find_report(project, bug_id);
    if (!r) {
        return nullptr;
    }
    for (auto& s : r->samples) {
        if (s.index == index) {
            return &s;
        }
    }
    return nullptr;
}

void RunManifest::add_extra_artifact(const std::string& rel_path) {
    if (std::find(extra_artifacts.begin(), extra_artifacts.end(), rel_path) == extra_artifacts.end()) {
        extra_artifacts.push_back(rel_path);
    }
}

bool RunManifest::stage_complete(const std::string& stage) const {
    auto it = stages.find(stage);
    return it != stages.end() && it->second.complete;
}

void RunManifest::mark_stage(const std::string& stage, bool complete) {
    StageState& st = stages[stage];
    st.complete = complete;
    st.attempt += 1;
}

void RunManifest::save() const {
    ordered_json j;
    j["run_id"] = run_id;
    j["created_utc"] = created_utc;
    j["corpus_digest"] = corpus_digest;
    j["config"] = config_snapshot;
    j["stages"] = ordered_json::object();
    for (const char* name : kStages) {
        auto it = stages.find(name);
        StageState st = it == stages.end() ? StageState{} : it->second;
        j["stages"][name] = ordered_json{{"complete", st.complete}, {"attempt", st.attempt}};
    }
    j["reports"] = ordered_json::array();
    for (const auto& r : reports) {
        ordered_json rj;
        rj["project"] = r.project;
        rj["bug_id"] = r.bug_id;
        rj["report_id"] = r.report_id;
        rj["samples"] = ordered_json::array();
        for (const auto& s : r.samples) {
            rj["samples"].push_back(sample_to_json(s));
        }
        j["reports"].push_back(std::move(rj));
    }
    j["extra_artifacts"] = extra_artifacts;
    write_file_atomic(dir / "manifest.rec", j.dump(2) + "\n");
}

RunManifest RunManifest::load(const fs::path& dir) {
    const fs::path file = dir / "manifest.rec";
    if (!fs::exists(file)) {
        throw Error("NoManifest", "no manifest.rec in " + dir.string());
    }
    const json j = json::parse(read_file(file));
    RunManifest m;
    m.dir = dir;
    m.run_id = j.value("run_id", "");
    m.created_utc = j.value("created_utc", "");
    m.corpus_digest = j.value("corpus_digest", "");
    m.config_snapshot = j.value("config", ordered_json::object());
    for (const char* name : kStages) {
        if (j.contains("stages") && j["stages"].contains(name)) {
            const auto& st = j["stages"][name];
            m.stages[name] = StageState{st.value("complete", false), st.value("attempt", 0)};
        }
    }
    for (const auto& rj : j.value("reports", json::array())) {
        ReportEntry r;
        r.project = rj.at("project").get<std::string>();
        r.bug_id = rj.at("bug_id").get<std::string>();
        r.report_id = rj.value("report_id", "");
        for (const auto& sj : rj.value("samples", json::array())) {
            r.samples.push_back(sample_from_json(sj));
        }
        m.reports.push_back(std::move(r));
    }
    m.extra_artifacts = j.value("extra_artifacts", std::vector<std::string>{});
    return m;
}

RunManifest open_run(const fs::path& dir, const Config& cfg) {
    const std::string corpus_digest = sha256_file(cfg.corpus_path);
    const ordered_json snapshot = cfg.snapshot();

    if (fs::exists(dir / "manifest.rec")) {
        RunManifest m = RunManifest::load(dir);
        if (m.corpus_digest != corpus_digest) {
            throw ConfigMismatch("corpus file changed since the run was created");
        }
        if (comparable_config(m.config_snapshot) != comparable_config(snapshot)) {
            throw ConfigMismatch("configuration changed since the run was created; "
                                 "start a fresh run directory");
        }
        // location fields may legitimately move between resumes
        m.config_snapshot = snapshot;
        m.dir = dir;
        return m;
    }

    fs::create_directories(dir);
    RunManifest m;
    m.dir = dir;
    m.created_utc = utc_timestamp();
    m.corpus_digest = corpus_digest;
    m.config_snapshot = snapshot;
    m.run_id = m.created_utc + "-" + sha256_hex(snapshot.dump() + corpus_digest).substr(0, 8);
    for (const char* name : kStages) {
        m.stages[name] = StageState{};
    }
    m.save();
    return m;
}

std::vector<std::string> verify_run(const fs::path& dir) {
    std::vector<std::string> findings;
    if (!fs::exists(dir / "manifest.rec")) {
        findings.push_back("missing manifest.rec");
        return findings;
    }
    RunManifest m;
    try {
        m = RunManifest::load(dir);
    } catch (const std::exception& e) {
        findings.push_back(std::string("unreadable manifest: ") + e.what());
        return findings;
    }

    std::set<std::string> referenced;
    auto note = [&](const std::string& rel) {
        if (!rel.empty()) {
            referenced.insert(rel);
        }
    };
    for (const auto& r : m.reports) {
        for (const auto& s : r.samples) {
            note(s.raw);
            note(s.extraction);
            note(s.parsed);
            note(s.compile_log);
            note(s.test_log);
            note(s.outcome);
        }
    }
    for (const auto& extra : m.extra_artifacts) {
        note(extra);
    }

    for (const auto& rel : referenced) {
        if (!fs::exists(dir / rel)) {
            findings.push_back("dangling reference: " + rel);
        }
    }

    for (auto it = fs::recursive_directory_iterator(dir); it != fs::recursive_directory_iterator(); ++it) {
        const fs::path& p = it->path();
        const std::string name = p.filename().string();
        if (it->is_directory()) {
            if (!name.empty() && name[0] == '.') {
                it.disable_recursion_pending(); // scratch area, not part of the run record
            }
            continue;
        }
        const std::string rel = fs::relative(p, dir).generic_string();
        if (rel == "manifest.rec" || (!name.empty() && name[0] == '.') || p.extension() == ".tmp") {
            continue;
        }
        if (!referenced.count(rel)) {
            findings.push_back("unreferenced artifact: " + rel);
        }
    }
    std::sort(findings.begin(), findings.end());
    return findings;
}

} // namespace bugrepro
