#pragma once

// Command-line front end.  Arguments and an optional JSON config file are
// merged into a RunConfig (flags win over file values), validated, and
// dispatched.  Exit status: 0 success, 1 verification failure, 2 usage or
// domain error, 3 numerical failure.  Errors are written to the error stream
// as a one-line JSON record.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace slgeo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

struct RunConfig {
  std::string command;
  /// Option name (without dashes) -> string value; flags hold "true".
  nlohmann::json options = nlohmann::json::object();
};

std::vector<std::string> commands();

/// Builds a RunConfig from argv.  `--config FILE` loads a JSON object whose
/// keys are option names (and optionally "command").  Throws DomainError on
/// unknown commands or keys.  Returns false when help was printed instead.
bool parse_args(int argc, const char* const* argv, RunConfig& cfg, std::ostream& out);

/// Runs a validated config; output goes to `out` or to the file named by
/// the "out" option.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_args + dispatch with error mapping to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slgeo::cli
