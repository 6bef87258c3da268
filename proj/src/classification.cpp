#include "bugrepro/classification.hpp"

#include <algorithm>
#include <set>

#include "bugrepro/errors.hpp"

namespace bugrepro {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::NOT_EXECUTABLE: return "NOT_EXECUTABLE";
    case Verdict::EXECUTABLE_INVALID: return "EXECUTABLE_INVALID";
    case Verdict::EXECUTABLE_VALID: return "EXECUTABLE_VALID";
    case Verdict::EXECUTABLE_UNDETERMINED: return "EXECUTABLE_UNDETERMINED";
    }
    return "NOT_EXECUTABLE";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "NOT_EXECUTABLE") return Verdict::NOT_EXECUTABLE;
    if (s == "EXECUTABLE_INVALID") return Verdict::EXECUTABLE_INVALID;
    if (s == "EXECUTABLE_VALID") return Verdict::EXECUTABLE_VALID;
    if (s == "EXECUTABLE_UNDETERMINED") return Verdict::EXECUTABLE_UNDETERMINED;
    throw Error("BadRecord", "unknown verdict: " + s);
}

static std::string simple_class_name(const std::string& qualified) {
    auto dot = qualified.rfind('.');
    return dot == std::string::npos ? qualified : qualified.substr(dot + 1);
}

bool matches_injected(const std::string& qualified, const std::string& injected_class,
                      const std::vector<std::string>& injected_methods) {
    if (injected_class.empty()) {
        return false;
    }
    std::string class_part;
    std::string method_part;
    auto sep = qualified.find("::");
    if (sep != std::string::npos) {
        class_part = qualified.substr(0, sep);
        method_part = qualified.substr(sep + 2);
    } else {
        auto dot = qualified.rfind('.');
        if (dot == std::string::npos) {
            return false;
        }
        class_part = qualified.substr(0, dot);
        method_part = qualified.substr(dot + 1);
    }
    const bool class_ok = class_part == injected_class || class_part == simple_class_name(injected_class);
    if (!class_ok) {
        return false;
    }
    return std::find(injected_methods.begin(), injected_methods.end(), method_part) !=
           injected_methods.end();
}

ClassifyDecision classify_sample(const ExecutionOutcome& outcome, const std::string& injected_class,
                                 const std::vector<std::string>& injected_methods,
                                 const std::vector<std::string>& baseline, int max_attempts) {
    if (!outcome.failing_tests.empty() && outcome.run != RunStatus::completed) {
        throw InconsistentOutcome("failing tests reported for a run with status " + to_string(outcome.run));
    }

    ClassifyDecision decision;
    SampleVerdict& v = decision.verdict;

    if (!outcome.compile.ok) {
        v.value = Verdict::NOT_EXECUTABLE;
        v.reason = "compile_failed";
        return decision;
    }

    switch (outcome.run) {
    case RunStatus::infrastructure_error:
        if (outcome.attempts < max_attempts) {
            decision.rerun_requested = true;
            return decision;
        }
        // recurred after the automatic re-run: flagged, never silently dropped
        v.value = Verdict::NOT_EXECUTABLE;
        v.reason = "infrastructure";
        return decision;
    case RunStatus::timed_out:
        v.value = Verdict::EXECUTABLE_UNDETERMINED;
        v.reason = "suite_timeout";
        return decision;
    case RunStatus::completed:
        break;
    }

    const std::set<std::string> base(baseline.begin(), baseline.end());
    for (const auto& name : outcome.failing_tests) {
        if (base.count(name)) {
            continue;
        }
        if (matches_injected(name, injected_class, injected_methods)) {
            v.value = Verdict::EXECUTABLE_VALID;
            auto kind = outcome.failure_kinds.find(name);
            if (kind != outcome.failure_kinds.end() && kind->second == "assertion") {
                v.reason = "valid_assertion_failure";
            } else if (kind != outcome.failure_kinds.end() && kind->second == "error") {
                v.reason = "valid_test_error";
            } else {
                v.reason = "valid_new_failure";
            }
            return decision;
        }
    }
    v.value = Verdict::EXECUTABLE_INVALID;
    v.reason = "no_attributed_failure";
    return decision;
}

SampleVerdict no_code_verdict(const std::string& log_ref) {
    return {Verdict::NOT_EXECUTABLE, "no_code", log_ref};
}

ReportResult aggregate_report(std::vector<SampleVerdict> verdicts) {
    ReportResult r;
    r.sample_verdicts = std::move(verdicts);
    bool any_undetermined_sample = false;
    for (const auto& v : r.sample_verdicts) {
        switch (v.value) {
        case Verdict::NOT_EXECUTABLE:
            break;
        case Verdict::EXECUTABLE_INVALID:
            r.any_executable = true;
            break;
        case Verdict::EXECUTABLE_VALID:
            r.any_executable = true;
            r.any_valid = true;
            break;
        case Verdict::EXECUTABLE_UNDETERMINED:
            r.any_executable = true;
            any_undetermined_sample = true;
            break;
        }
    }
    r.undetermined = r.any_executable && !r.any_valid && any_undetermined_sample;
    return r;
}

} // namespace bugrepro
