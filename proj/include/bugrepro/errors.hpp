#pragma once

#include <stdexcept>
#include <string>

namespace bugrepro {

// Base for all harness errors. `code()` is a stable machine-readable tag
// used by the CLI to map failures onto exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// --- configuration / usage ---
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("ConfigError", msg) {}
};
struct ConfigMismatch : Error {
    explicit ConfigMismatch(const std::string& msg) : Error("ConfigMismatch", msg) {}
};
struct DependencyError : Error {
    explicit DependencyError(const std::string& msg) : Error("DependencyError", msg) {}
};

// --- corpus ---
struct MalformedRecord : Error {
    MalformedRecord(int line, const std::string& cause)
        : Error("MalformedRecord", "line " + std::to_string(line) + ": " + cause), line(line), cause(cause) {}
    int line;
    std::string cause;
};
struct DuplicateFaultId : Error {
    DuplicateFaultId(const std::string& project, const std::string& bug_id)
        : Error("DuplicateFaultId", project + ":" + bug_id), project(project), bug_id(bug_id) {}
    std::string project;
    std::string bug_id;
};
struct EmptyCorpus : Error {
    explicit EmptyCorpus(const std::string& msg) : Error("EmptyCorpus", msg) {}
};

// --- generation / providers ---
struct ProviderUnavailable : Error {
    explicit ProviderUnavailable(const std::string& msg) : Error("ProviderUnavailable", msg) {}
};
struct RateLimited : Error {
    RateLimited(const std::string& msg, double retry_after_s)
        : Error("RateLimited", msg), retry_after_s(retry_after_s) {}
    double retry_after_s;
};
struct MalformedProviderReply : Error {
    explicit MalformedProviderReply(const std::string& msg) : Error("MalformedProviderReply", msg) {}
};
struct ReplayMiss : Error {
    ReplayMiss(const std::string& digest, int index)
        : Error("ReplayMiss", "no stored response for key " + digest + " (sample " + std::to_string(index) + ")"),
          digest(digest), index(index) {}
    std::string digest;
    int index;
};

// --- extraction ---
struct NoCodeFound : Error {
    explicit NoCodeFound(const std::string& msg) : Error("NoCodeFound", msg) {}
};

// --- harness / adapters ---
struct CheckoutFailed : Error {
    explicit CheckoutFailed(const std::string& msg) : Error("CheckoutFailed", msg) {}
};
struct BaselineCompileFailed : Error {
    explicit BaselineCompileFailed(const std::string& msg) : Error("BaselineCompileFailed", msg) {}
};
struct BaselineTimedOut : Error {
    explicit BaselineTimedOut(const std::string& msg) : Error("BaselineTimedOut", msg) {}
};
struct InjectionCollision : Error {
    explicit InjectionCollision(const std::string& msg) : Error("InjectionCollision", msg) {}
};
struct InfrastructureError : Error {
    explicit InfrastructureError(const std::string& msg) : Error("InfrastructureError", msg) {}
};

// --- classification / metrics ---
struct InconsistentOutcome : Error {
    explicit InconsistentOutcome(const std::string& msg) : Error("InconsistentOutcome", msg) {}
};
struct MissingProject : Error {
    explicit MissingProject(const std::string& msg) : Error("MissingProject", msg) {}
};

} // namespace bugrepro
