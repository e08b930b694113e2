#pragma once

#include <iosfwd>

namespace hrbr {

// Entry point of hrbr_lab. Subcommands: run, compare, model.
// Exit codes: 0 completed, 1 bad configuration, 2 unrecoverable, 3 singular.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hrbr
