#include "greenopt/subprocess.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>

namespace greenopt {

namespace {

CommandResult run_child(const std::vector<std::string>& argv, double timeout_s) {
    if (argv.empty())
        throw std::invalid_argument("empty command");
    int fds[2];
    if (pipe(fds) != 0)
        throw std::runtime_error("pipe failed: " + std::string(std::strerror(errno)));

    const pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        throw std::runtime_error("fork failed: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
        setpgid(0, 0);
        dup2(fds[1], STDOUT_FILENO);
        close(fds[0]);
        close(fds[1]);
        std::vector<char*> cargv;
        cargv.reserve(argv.size() + 1);
        for (const auto& a : argv)
            cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        _exit(127);
    }

    setpgid(pid, pid);  // parent side too; harmless after exec
    close(fds[1]);

    CommandResult result{0, false, {}};
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(timeout_s > 0 ? timeout_s : 0));
    char buf[4096];
    auto grace_end = std::chrono::steady_clock::time_point::max();
    while (true) {
        int wait_ms = -1;
        if (result.timed_out) {
            if (std::chrono::steady_clock::now() >= grace_end)
                break;  // a stray descendant escaped the group kill
            wait_ms = 50;
        } else if (timeout_s > 0) {
            const auto left = deadline - std::chrono::steady_clock::now();
            wait_ms = static_cast<int>(
                std::chrono::duration_cast<std::chrono::milliseconds>(left).count());
            if (wait_ms < 0)
                wait_ms = 0;
        }
        pollfd pfd{fds[0], POLLIN, 0};
        const int rc = poll(&pfd, 1, wait_ms);
        if (rc < 0) {
            if (errno == EINTR)
                continue;
            break;
        }
        if (rc == 0 && !result.timed_out) {  // deadline hit: kill the whole group
            result.timed_out = true;
            grace_end = std::chrono::steady_clock::now() + std::chrono::seconds(2);
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
        }
        if (rc > 0) {
            const ssize_t got = read(fds[0], buf, sizeof(buf));
            if (got > 0) {
                result.output.append(buf, static_cast<std::size_t>(got));
                continue;
            }
            break;  // EOF or error: every writer is gone
        }
    }
    close(fds[0]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exit_code = 128 + WTERMSIG(status);
    else
        result.exit_code = -1;
    return result;
}

}  // namespace

CommandResult run_shell(const std::string& command, double timeout_s) {
    return run_child({"/bin/sh", "-c", command}, timeout_s);
}

CommandResult run_argv(const std::vector<std::string>& argv, double timeout_s) {
    return run_child(argv, timeout_s);
}

}  // namespace greenopt
