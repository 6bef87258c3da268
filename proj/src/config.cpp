#include "bugrepro/config.hpp"

#include <charconv>

#include "bugrepro/errors.hpp"
#include "bugrepro/ioutil.hpp"

namespace bugrepro {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::map<std::string, std::string> parse_ini(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::string section;
    for_each_line(text, [&](int line_no, std::string_view raw) {
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') {
            return;
        }
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            return;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2); // quoted: keep inner whitespace
        }
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        }
        kv[section.empty() ? key : section + "." + key] = value;
    });
    return kv;
}

namespace {

class KvReader {
public:
    KvReader(std::map<std::string, std::string> kv, fs::path base) : kv_(std::move(kv)), base_(std::move(base)) {}

    std::optional<std::string> get(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) {
            return std::nullopt;
        }
        used_.insert(key);
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& def) { return get(key).value_or(def); }

    fs::path path_or(const std::string& key, const fs::path& def) {
        auto v = get(key);
        if (!v || v->empty()) {
            return def;
        }
        fs::path p = *v;
        return p.is_absolute() ? p : base_ / p;
    }

    int int_or(const std::string& key, int def) {
        auto v = get(key);
        if (!v) {
            return def;
        }
        int out{};
        auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc() || ptr != v->data() + v->size()) {
            throw ConfigError(key + ": not an integer: " + *v);
        }
        return out;
    }

    double double_or(const std::string& key, double def) {
        auto v = get(key);
        if (!v) {
            return def;
        }
        try {
            std::size_t idx = 0;
            double out = std::stod(*v, &idx);
            if (idx != v->size()) {
                throw std::invalid_argument("trailing characters");
            }
            return out;
        } catch (const std::exception&) {
            throw ConfigError(key + ": not a number: " + *v);
        }
    }

    bool bool_or(const std::string& key, bool def) {
        auto v = get(key);
        if (!v) {
            return def;
        }
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ConfigError(key + ": not a boolean: " + *v);
    }

    // all keys under "<prefix>." that were not consumed by named lookups
    std::map<std::string, std::string> remaining_in(const std::string& prefix) {
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : kv_) {
            if (k.rfind(prefix + ".", 0) == 0 && !used_.count(k)) {
                out[k.substr(prefix.size() + 1)] = v;
            }
        }
        return out;
    }

private:
    std::map<std::string, std::string> kv_;
    fs::path base_;
    std::set<std::string> used_;
};

} // namespace

Config load_config(const fs::path& path) {
    if (!fs::exists(path)) {
        throw ConfigError("config file not found: " + path.string());
    }
    KvReader r(parse_ini(read_file(path)), fs::absolute(path).parent_path());

    Config cfg;
    cfg.corpus_path = r.path_or("run.corpus", "");
    auto meta = r.path_or("run.projects", "");
    if (!meta.empty()) {
        cfg.project_meta_path = meta;
    }
    cfg.run_dir = r.path_or("run.out", "");
    cfg.workers = r.int_or("run.workers", 1);
    cfg.instruction = r.get_or("run.instruction", kDefaultInstruction);

    cfg.provider.kind = r.get_or("provider.kind", "replay");
    cfg.provider.endpoint = r.get_or("provider.endpoint", "");
    cfg.provider.model = r.get_or("provider.model", "");
    cfg.provider.samples_per_report = r.int_or("run.samples_per_report", 5);
    cfg.provider.rate_limit_rps = r.double_or("provider.rate_limit_rps", 0.0);
    cfg.provider.retry.max_attempts = r.int_or("provider.retry_max_attempts", 3);
    cfg.provider.retry.initial_backoff =
        std::chrono::milliseconds(r.int_or("provider.retry_backoff_ms", 1000));
    cfg.provider.token_env = r.get_or("provider.token_env", "BUGREPRO_API_TOKEN");
    cfg.provider.replay_store = r.path_or("provider.store", "").string();
    cfg.provider.script_file = r.path_or("provider.script_file", "").string();
    cfg.provider.response = r.get_or("provider.response", "");
    cfg.provider.include_title = r.bool_or("provider.include_title", true);
    for (const auto& [k, v] : r.remaining_in("provider.params")) {
        cfg.provider.params[k] = v; // recorded verbatim
    }

    cfg.adapter.kind = r.get_or("adapter.kind", "scripted");
    cfg.adapter.checkout_cmd = r.get_or("adapter.checkout_cmd", "");
    cfg.adapter.compile_cmd = r.get_or("adapter.compile_cmd", "");
    cfg.adapter.test_cmd = r.get_or("adapter.test_cmd", "");
    cfg.adapter.failing_line_pattern = r.get_or("adapter.failing_line_pattern", "");
    cfg.adapter.timeout_s = r.double_or("adapter.timeout_s", 1800.0);
    cfg.adapter.grace_s = r.double_or("adapter.grace_s", 10.0);
    cfg.adapter.fixture = r.path_or("adapter.fixture", "");
    cfg.adapter.test_source_root_hint = r.get_or("adapter.test_source_root", "");
    cfg.adapter.rename_on_collision = r.bool_or("adapter.rename_on_collision", true);

    cfg.workspaces_dir = r.path_or("run.workspaces", "");

    if (cfg.corpus_path.empty()) {
        throw ConfigError("run.corpus is required");
    }
    if (cfg.run_dir.empty()) {
        throw ConfigError("run.out is required");
    }
    if (cfg.workspaces_dir.empty()) {
        cfg.workspaces_dir = cfg.run_dir / ".work";
    }
    if (cfg.workers < 1) {
        throw ConfigError("run.workers must be >= 1");
    }
    if (cfg.adapter.timeout_s <= 0.0) {
        throw ConfigError("adapter.timeout_s must be positive");
    }
    return cfg;
}

ordered_json Config::snapshot() const {
    ordered_json j;
    j["corpus"] = corpus_path.generic_string();
    j["projects"] = project_meta_path ? project_meta_path->generic_string() : "";
    j["run_dir"] = run_dir.generic_string();
    j["workspaces_dir"] = workspaces_dir.generic_string();
    j["workers"] = workers;
    j["instruction"] = instruction;
    j["provider"] = ordered_json{{"kind", provider.kind},
                                 {"endpoint", provider.endpoint},
                                 {"model", provider.model},
                                 {"samples_per_report", provider.samples_per_report},
                                 {"params", provider.params},
                                 {"rate_limit_rps", provider.rate_limit_rps},
                                 {"retry_max_attempts", provider.retry.max_attempts},
                                 {"retry_backoff_ms", static_cast<int>(provider.retry.initial_backoff.count())},
                                 {"token_env", provider.token_env},
                                 {"store", provider.replay_store},
                                 {"script_file", provider.script_file},
                                 {"response", provider.response},
                                 {"include_title", provider.include_title}};
    j["adapter"] = ordered_json{{"kind", adapter.kind},
                                {"checkout_cmd", adapter.checkout_cmd},
                                {"compile_cmd", adapter.compile_cmd},
                                {"test_cmd", adapter.test_cmd},
                                {"failing_line_pattern", adapter.failing_line_pattern},
                                {"timeout_s", adapter.timeout_s},
                                {"grace_s", adapter.grace_s},
                                {"fixture", adapter.fixture.generic_string()},
                                {"test_source_root", adapter.test_source_root_hint},
                                {"rename_on_collision", adapter.rename_on_collision}};
    return j;
}

Config config_from_snapshot(const json& j) {
    Config cfg;
    cfg.corpus_path = fs::path(j.at("corpus").get<std::string>());
    const std::string meta = j.value("projects", "");
    if (!meta.empty()) {
        cfg.project_meta_path = fs::path(meta);
    }
    cfg.run_dir = fs::path(j.at("run_dir").get<std::string>());
    cfg.workspaces_dir = fs::path(j.at("workspaces_dir").get<std::string>());
    cfg.workers = j.value("workers", 1);
    cfg.instruction = j.value("instruction", std::string(kDefaultInstruction));

    const auto& p = j.at("provider");
    cfg.provider.kind = p.value("kind", "replay");
    cfg.provider.endpoint = p.value("endpoint", "");
    cfg.provider.model = p.value("model", "");
    cfg.provider.samples_per_report = p.value("samples_per_report", 5);
    cfg.provider.params = p.value("params", ordered_json::object());
    cfg.provider.rate_limit_rps = p.value("rate_limit_rps", 0.0);
    cfg.provider.retry.max_attempts = p.value("retry_max_attempts", 3);
    cfg.provider.retry.initial_backoff = std::chrono::milliseconds(p.value("retry_backoff_ms", 1000));
    cfg.provider.token_env = p.value("token_env", "BUGREPRO_API_TOKEN");
    cfg.provider.replay_store = p.value("store", "");
    cfg.provider.script_file = p.value("script_file", "");
    cfg.provider.response = p.value("response", "");
    cfg.provider.include_title = p.value("include_title", true);

    const auto& a = j.at("adapter");
    cfg.adapter.kind = a.value("kind", "scripted");
    cfg.adapter.checkout_cmd = a.value("checkout_cmd", "");
    cfg.adapter.compile_cmd = a.value("compile_cmd", "");
    cfg.adapter.test_cmd = a.value("test_cmd", "");
    cfg.adapter.failing_line_pattern = a.value("failing_line_pattern", "");
    cfg.adapter.timeout_s = a.value("timeout_s", 1800.0);
    cfg.adapter.grace_s = a.value("grace_s", 10.0);
    cfg.adapter.fixture = fs::path(a.value("fixture", ""));
    cfg.adapter.test_source_root_hint = a.value("test_source_root", "");
    cfg.adapter.rename_on_collision = a.value("rename_on_collision", true);
    return cfg;
}

} // namespace bugrepro
