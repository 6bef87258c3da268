#include "bugrepro/generation.hpp"

#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "bugrepro/digest.hpp"
#include "bugrepro/errors.hpp"
#include "bugrepro/ioutil.hpp"

namespace bugrepro {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

Prompt build_prompt(const BugReport& report, const std::string& instruction, bool include_title) {
    Prompt p;
    p.instruction = instruction;
    if (include_title) {
        p.report_text = report.title + "\n" + report.body;
    } else {
        p.report_text = report.body;
    }
    p.rendered = p.instruction + "\n" + p.report_text;
    return p;
}

std::string replay_key(const Prompt& prompt, int sample_index) {
    std::string material = prompt.rendered;
    material.push_back('\0');
    material += std::to_string(sample_index);
    return sha256_hex(material);
}

namespace {

ProviderMeta make_meta(const ProviderConfig& cfg, const std::string& provider_name, const Prompt& prompt,
                       int index) {
    ProviderMeta meta;
    meta.provider = provider_name;
    meta.model = cfg.model;
    meta.endpoint = cfg.endpoint;
    meta.params = cfg.params;
    meta.sample_index = index;
    meta.replay_key = replay_key(prompt, index);
    meta.timestamp_utc = utc_timestamp();
    return meta;
}

class ReplayProvider final : public Provider {
public:
    explicit ReplayProvider(const ProviderConfig& cfg) : store_(cfg.replay_store) {
        if (store_.empty()) {
            throw ConfigError("replay provider requires provider.store");
        }
    }

    std::string fetch(const Prompt& prompt, int sample_index) override {
        const std::string key = replay_key(prompt, sample_index);
        const fs::path file = store_ / key;
        if (!fs::exists(file)) {
            throw ReplayMiss(key, sample_index);
        }
        return read_file(file);
    }

    std::string name() const override { return "replay"; }

private:
    fs::path store_;
};

class ScriptedProvider final : public Provider {
public:
    explicit ScriptedProvider(const ProviderConfig& cfg) : inline_response_(cfg.response) {
        if (!cfg.script_file.empty()) {
            json table = json::parse(read_file(cfg.script_file));
            if (table.contains("default")) {
                for (const auto& s : table["default"]) {
                    defaults_.push_back(s.get<std::string>());
                }
            }
            if (table.contains("overrides")) {
                for (const auto& [k, v] : table["overrides"].items()) {
                    overrides_[k] = v.get<std::string>();
                }
            }
            has_script_ = true;
        }
    }

    std::string fetch(const Prompt& prompt, int sample_index) override {
        if (has_script_) {
            const std::string key = replay_key(prompt, sample_index);
            auto it = overrides_.find(key);
            if (it != overrides_.end()) {
                return it->second;
            }
            if (!defaults_.empty()) {
                return defaults_[static_cast<std::size_t>(sample_index - 1) % defaults_.size()];
            }
        }
        if (!inline_response_.empty()) {
            return inline_response_;
        }
        throw ProviderUnavailable("scripted provider has no response for sample " +
                                  std::to_string(sample_index));
    }

    std::string name() const override { return "scripted"; }

private:
    bool has_script_ = false;
    std::vector<std::string> defaults_;
    std::map<std::string, std::string> overrides_;
    std::string inline_response_;
};

struct UrlParts {
    std::string base; // scheme://host[:port]
    std::string path;
};

UrlParts split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("provider endpoint is not a URL: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpChatProvider final : public Provider {
public:
    explicit HttpChatProvider(const ProviderConfig& cfg) : cfg_(cfg), url_(split_url(cfg.endpoint)) {
        if (const char* tok = std::getenv(cfg.token_env.c_str())) {
            token_ = tok;
        }
        min_interval_ = cfg.rate_limit_rps > 0.0
                            ? std::chrono::duration<double>(1.0 / cfg.rate_limit_rps)
                            : std::chrono::duration<double>(0.0);
    }

    std::string fetch(const Prompt& prompt, int /*sample_index*/) override {
        ordered_json body;
        body["model"] = cfg_.model;
        body["messages"] = ordered_json::array({ordered_json{{"role", "user"}, {"content", prompt.rendered}}});
        for (const auto& [k, v] : cfg_.params.items()) {
            body[k] = v;
        }
        const std::string payload = body.dump();

        auto backoff = std::chrono::duration<double>(
            std::chrono::duration_cast<std::chrono::duration<double>>(cfg_.retry.initial_backoff));
        int last_status = 0;
        std::string last_error;
        double retry_after = 0.0;

        for (int attempt = 1; attempt <= std::max(1, cfg_.retry.max_attempts); ++attempt) {
            if (attempt > 1) {
                std::this_thread::sleep_for(
                    std::chrono::duration<double>(std::max(backoff.count(), retry_after)));
                backoff *= 2;
            }
            throttle();

            httplib::Client client(url_.base);
            client.set_read_timeout(120, 0);
            httplib::Headers headers;
            if (!token_.empty()) {
                headers.emplace("Authorization", "Bearer " + token_);
            }
            auto res = client.Post(url_.path, headers, payload, "application/json");

            if (!res) {
                last_status = 0;
                last_error = "connection failed: " + httplib::to_string(res.error());
                continue; // retryable
            }
            last_status = res->status;
            if (res->status == 200) {
                return parse_completion(res->body);
            }
            if (res->status == 429) {
                retry_after = 0.0;
                if (res->has_header("Retry-After")) {
                    retry_after = std::atof(res->get_header_value("Retry-After").c_str());
                }
                last_error = "rate limited";
                continue; // retryable
            }
            if (res->status == 408 || res->status >= 500) {
                last_error = "http status " + std::to_string(res->status);
                continue; // retryable
            }
            throw ProviderUnavailable("http status " + std::to_string(res->status) + " from " +
                                      cfg_.endpoint);
        }

        if (last_status == 429) {
            throw RateLimited("still rate limited after " + std::to_string(cfg_.retry.max_attempts) +
                                  " attempts",
                              retry_after);
        }
        throw ProviderUnavailable(last_error + " (after " + std::to_string(cfg_.retry.max_attempts) +
                                  " attempts)");
    }

    std::string name() const override { return "http-chat"; }

private:
    void throttle() {
        if (min_interval_.count() <= 0.0) {
            return;
        }
        std::unique_lock<std::mutex> lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        const auto earliest = last_request_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                  min_interval_);
        if (last_request_.time_since_epoch().count() != 0 && now < earliest) {
            std::this_thread::sleep_for(earliest - now);
        }
        last_request_ = std::chrono::steady_clock::now();
    }

    static std::string parse_completion(const std::string& body) {
        json reply;
        try {
            reply = json::parse(body);
        } catch (const json::exception& e) {
            throw MalformedProviderReply(std::string("reply is not JSON: ") + e.what());
        }
        if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty()) {
            throw MalformedProviderReply("reply has no choices");
        }
        const auto& first = reply["choices"][0];
        if (!first.contains("message") || !first["message"].contains("content") ||
            !first["message"]["content"].is_string()) {
            throw MalformedProviderReply("reply has no message content");
        }
        return first["message"]["content"].get<std::string>();
    }

    ProviderConfig cfg_;
    UrlParts url_;
    std::string token_;
    std::chrono::duration<double> min_interval_{0.0};
    std::mutex mutex_;
    std::chrono::steady_clock::time_point last_request_{};
};

} // namespace

std::unique_ptr<Provider> make_provider(const ProviderConfig& cfg) {
    if (cfg.kind == "replay") {
        return std::make_unique<ReplayProvider>(cfg);
    }
    if (cfg.kind == "scripted") {
        return std::make_unique<ScriptedProvider>(cfg);
    }
    if (cfg.kind == "http-chat") {
        if (cfg.endpoint.empty()) {
            throw ConfigError("http-chat provider requires provider.endpoint");
        }
        return std::make_unique<HttpChatProvider>(cfg);
    }
    throw ConfigError("unknown provider kind: " + cfg.kind);
}

GenerationBatch generate_samples(const BugReport& report, const Prompt& prompt, Provider& provider,
                                 const ProviderConfig& cfg,
                                 const std::function<void(const GenerationSample&)>& persist) {
    if (cfg.samples_per_report < 1) {
        throw ConfigError("samples_per_report must be >= 1");
    }
    GenerationBatch batch;
    for (int idx = 1; idx <= cfg.samples_per_report; ++idx) {
        try {
            GenerationSample sample;
            sample.project = report.project;
            sample.bug_id = report.bug_id;
            sample.sample_index = idx;
            sample.raw_response = provider.fetch(prompt, idx);
            sample.meta = make_meta(cfg, provider.name(), prompt, idx);
            if (persist) {
                persist(sample);
            }
            batch.samples.push_back(std::move(sample));
        } catch (const Error& e) {
            batch.errors.push_back({idx, e.code(), e.what()});
        }
    }
    return batch;
}

} // namespace bugrepro
