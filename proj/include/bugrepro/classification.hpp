#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bugrepro/harness.hpp"

namespace bugrepro {

enum class Verdict { NOT_EXECUTABLE, EXECUTABLE_INVALID, EXECUTABLE_VALID, EXECUTABLE_UNDETERMINED };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct SampleVerdict {
    Verdict value = Verdict::NOT_EXECUTABLE;
    std::string reason;  // machine-readable reason code
    std::string log_ref; // log file backing the evidence
};

struct ReportResult {
    std::string project;
    std::string bug_id;
    std::string report_id;
    std::vector<SampleVerdict> sample_verdicts; // length <= N
    bool any_executable = false;
    bool any_valid = false;
    bool undetermined = false; // executable, not valid, and some sample undetermined
};

// classify_sample either yields a verdict or asks for a re-run (the one case
// is an infrastructure error with retries remaining).
struct ClassifyDecision {
    bool rerun_requested = false;
    SampleVerdict verdict; // meaningful when !rerun_requested
};

// Maps one post-injection execution outcome onto the verdict lattice.
//   compile failed                    -> NOT_EXECUTABLE
//   compiled, timed out               -> EXECUTABLE_UNDETERMINED
//   compiled, completed, new failing
//   test attributed to the injection  -> EXECUTABLE_VALID
//   compiled, completed, otherwise    -> EXECUTABLE_INVALID
//   infrastructure error              -> re-run request (never a silent verdict);
//                                        with retries exhausted, NOT_EXECUTABLE
//                                        with reason "infrastructure"
// Throws InconsistentOutcome when failing tests are reported for a run that
// did not complete.
ClassifyDecision classify_sample(const ExecutionOutcome& outcome, const std::string& injected_class,
                                 const std::vector<std::string>& injected_methods,
                                 const std::vector<std::string>& baseline,
                                 int max_attempts = 2);

// Verdict for a sample whose extraction found no code at all.
SampleVerdict no_code_verdict(const std::string& log_ref = "");

// "At least one" aggregation over a report's sample verdicts; order-insensitive.
ReportResult aggregate_report(std::vector<SampleVerdict> verdicts);

// True when `qualified` (pkg.Class::method or pkg.Class.method) names the
// injected class and one of its detected test methods.
bool matches_injected(const std::string& qualified, const std::string& injected_class,
                      const std::vector<std::string>& injected_methods);

} // namespace bugrepro
