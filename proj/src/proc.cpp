#include "bugrepro/proc.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

namespace bugrepro {

using Clock = std::chrono::steady_clock;

ProcResult run_command(const std::string& command, const std::filesystem::path& cwd, double timeout_s) {
    ProcResult res;
    int pipefd[2];
    if (pipe(pipefd) != 0) {
        res.start_ok = false;
        res.error = std::string("pipe: ") + std::strerror(errno);
        return res;
    }

    const auto start = Clock::now();
    pid_t pid = fork();
    if (pid < 0) {
        close(pipefd[0]);
        close(pipefd[1]);
        res.start_ok = false;
        res.error = std::string("fork: ") + std::strerror(errno);
        return res;
    }

    if (pid == 0) {
        // child: own process group so a timeout kill reaps grandchildren too
        setpgid(0, 0);
        close(pipefd[0]);
        dup2(pipefd[1], STDOUT_FILENO);
        dup2(pipefd[1], STDERR_FILENO);
        close(pipefd[1]);
        if (!cwd.empty() && chdir(cwd.c_str()) != 0) {
            const char* msg = "cannot chdir to workspace\n";
            ssize_t ignored = write(STDERR_FILENO, msg, std::strlen(msg));
            (void)ignored;
            _exit(127);
        }
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    close(pipefd[1]);
    fcntl(pipefd[0], F_SETFL, O_NONBLOCK);

    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(timeout_s));
    bool killed = false;
    bool child_done = false;
    int status = 0;

    char buf[4096];
    while (true) {
        struct pollfd pfd{pipefd[0], POLLIN, 0};
        int pr = poll(&pfd, 1, 50);
        if (pr > 0) {
            ssize_t n;
            while ((n = read(pipefd[0], buf, sizeof(buf))) > 0) {
                res.output.append(buf, static_cast<std::size_t>(n));
            }
            if (n == 0) {
                break; // writer side closed
            }
        }
        if (!child_done) {
            pid_t w = waitpid(pid, &status, WNOHANG);
            if (w == pid) {
                child_done = true;
            }
        }
        if (!killed && Clock::now() >= deadline) {
            kill(-pid, SIGKILL);
            killed = true;
            res.timed_out = true;
        }
        if (child_done) {
            // drain whatever is left, then stop once the pipe is dry
            ssize_t n;
            bool saw_data = false;
            while ((n = read(pipefd[0], buf, sizeof(buf))) > 0) {
                res.output.append(buf, static_cast<std::size_t>(n));
                saw_data = true;
            }
            if (n == 0 || (!saw_data && errno == EAGAIN)) {
                break;
            }
        }
    }
    close(pipefd[0]);

    if (!child_done) {
        waitpid(pid, &status, 0);
    }
    if (killed) {
        // reap any stragglers in the group
        kill(-pid, SIGKILL);
    }

    res.duration_s = std::chrono::duration<double>(Clock::now() - start).count();
    if (WIFEXITED(status)) {
        res.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        res.exit_code = 128 + WTERMSIG(status);
    }
    return res;
}

} // namespace bugrepro
