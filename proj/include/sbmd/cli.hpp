#ifndef SBMD_CLI_HPP
#define SBMD_CLI_HPP

namespace sbmd {

// Entry point behind the sbmd binary. Exit codes: 0 success, 1 configuration
// error, 2 verification failure, 3 I/O error.
int cli_main(int argc, const char* const* argv);

}  // namespace sbmd

#endif
