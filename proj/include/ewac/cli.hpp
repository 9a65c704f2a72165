#ifndef EWAC_CLI_HPP
#define EWAC_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ewac::cli {

enum ExitCode : int {
  kSuccess = 0,
  kParseError = 2,
  kInfeasible = 3,
  kNumericalFailure = 4,
};

/// Runs the command line `args` (without the program name). Reports go to
/// `out` unless an output file is configured; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Fixed CSV headers.
inline constexpr const char* kSmoothHeader = "t,delta_f,delta_b";
inline constexpr const char* kEtaSweepHeader =
    "eta,lb,ub,lb_cs,ub_cs,lb_inhom,ub_inhom,ewac_I,ewac_P,ewac_N,naive";
inline constexpr const char* kHorizonSweepHeader = "T,lb_per_T,ub_per_T,naive_per_T,limit_per_T";
inline constexpr const char* kWacHeader = "theta,sample,wac";

/// 12 significant digits.
std::string format_number(double value);

}  // namespace ewac::cli

#endif  // EWAC_CLI_HPP
