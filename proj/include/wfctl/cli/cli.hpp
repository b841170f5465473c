#pragma once

#include <span>
#include <string>
#include <vector>

namespace wfctl::cli {

// Exit codes: 0 success, 1 domain failure (diagnostics, deadlocks, no
// supervisor, blocked products, ...), 2 usage, parse or I/O error.
struct CommandOutcome {
    int exit_code = 0;
    std::string out;
    std::string err;
};

// args excludes the program name.
CommandOutcome execute(std::span<const std::string> args);

}  // namespace wfctl::cli
