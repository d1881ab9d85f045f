// Command-line entry point: synth / train / train-baseline / eval /
// reproduce over streams injected for testability.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace umauc {

// args excludes the program name. Returns 0 on success, 2 on usage errors
// (unknown flag, missing argument, unreadable file), 1 on runtime failures.
// Successful subcommands end stdout with a machine-parseable line
// `RESULT <json>`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace umauc
