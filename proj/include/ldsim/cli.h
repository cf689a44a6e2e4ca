#ifndef LDSIM_CLI_H_
#define LDSIM_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace ldsim {

// Process exit codes.
enum Exit_code : int {
  k_exit_ok = 0,
  k_exit_validation = 2,
  k_exit_io = 3,
  k_exit_convergence = 4,
};

// Entry point of the `ldsim` tool. `args` excludes the program name.
auto run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int;

}  // namespace ldsim

#endif  // LDSIM_CLI_H_
