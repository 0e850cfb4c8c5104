#ifndef SCENET_CLI_HPP
#define SCENET_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace scenet {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int numeric = 2;
}  // namespace exit_code

/// Runs the command line `args` (without the program name). Tables go to
/// `out` unless --output is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scenet

#endif  // SCENET_CLI_HPP
