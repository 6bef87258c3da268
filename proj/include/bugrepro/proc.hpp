#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace bugrepro {

struct ProcResult {
    int exit_code = -1;        // meaningful only when !timed_out && start_ok
    bool timed_out = false;
    bool start_ok = true;
    std::string output;        // combined stdout+stderr
    double duration_s = 0.0;
    std::string error;         // populated when start_ok is false
};

// Runs `command` through /bin/sh -c in `cwd`, merging stdout/stderr.
// The whole process group is killed when the wall-clock timeout expires.
ProcResult run_command(const std::string& command,
                       const std::filesystem::path& cwd,
                       double timeout_s);

} // namespace bugrepro
