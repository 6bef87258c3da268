#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bugrepro/corpus.hpp"

namespace bugrepro {

// The one instruction used for every query, verbatim, including the trailing
// colon and space.
inline constexpr const char* kDefaultInstruction = "write a Java test case for the following bug report: ";

struct Prompt {
    std::string instruction;
    std::string report_text;
    std::string rendered; // instruction + "\n" + report_text
};

// rendered = instruction + "\n" + title + "\n" + body. The report text is
// used as written: no cleanup, no follow-up comments, no attachments.
Prompt build_prompt(const BugReport& report, const std::string& instruction, bool include_title = true);

// Stable content digest of (rendered prompt, sample index); identical across
// runs and platforms. Names replay-store entries.
std::string replay_key(const Prompt& prompt, int sample_index);

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{1000}; // doubles per attempt
};

struct ProviderConfig {
    std::string kind = "replay"; // http-chat | replay | scripted
    std::string endpoint;        // http-chat: full chat-completions URL
    std::string model;
    int samples_per_report = 5;
    nlohmann::ordered_json params = nlohmann::ordered_json::object(); // sent verbatim
    double rate_limit_rps = 0.0; // 0 = unlimited
    RetryPolicy retry;
    std::string token_env = "BUGREPRO_API_TOKEN";
    std::string replay_store;  // replay: directory of digest-named files
    std::string script_file;   // scripted: optional response table
    std::string response;      // scripted: inline single response
    bool include_title = true;
};

struct ProviderMeta {
    std::string provider;
    std::string model;
    std::string endpoint;
    nlohmann::ordered_json params;
    int sample_index = 0;
    std::string replay_key;
    std::string timestamp_utc;
};

struct GenerationSample {
    std::string project;
    std::string bug_id;
    int sample_index = 0;       // 1..N
    std::string raw_response;   // byte-exact as received
    ProviderMeta meta;
};

struct SampleError {
    int sample_index = 0;
    std::string code;
    std::string message;
};

struct GenerationBatch {
    std::vector<GenerationSample> samples;
    std::vector<SampleError> errors;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string fetch(const Prompt& prompt, int sample_index) = 0;
    virtual std::string name() const = 0;
};

// Builds the configured provider. Providers are safe for concurrent use; the
// http-chat provider enforces its rate limit across all callers of the
// instance.
std::unique_ptr<Provider> make_provider(const ProviderConfig& cfg);

// Requests cfg.samples_per_report responses, indices 1..N, sequentially.
// Every obtained sample is handed to `persist` before being returned; a
// failing index yields an error record and the loop continues.
GenerationBatch generate_samples(const BugReport& report, const Prompt& prompt, Provider& provider,
                                 const ProviderConfig& cfg,
                                 const std::function<void(const GenerationSample&)>& persist);

} // namespace bugrepro
