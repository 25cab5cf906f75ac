#pragma once

#include <string>
#include <vector>

namespace greenopt {

struct CommandResult {
    int exit_code;      // 128 + signal when killed
    bool timed_out;
    std::string output;  // captured stdout
};

// Both run the child in its own process group; on timeout the whole group is
// killed. timeout_s <= 0 means no deadline.
CommandResult run_shell(const std::string& command, double timeout_s);
CommandResult run_argv(const std::vector<std::string>& argv, double timeout_s);

}  // namespace greenopt
