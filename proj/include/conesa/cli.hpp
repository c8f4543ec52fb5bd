#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conesa/experiments.hpp"

namespace conesa::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kOutputDirEnv = "CONESA_OUTPUT_DIR";

enum class Command { project, onegen, dynamics, steady, predict };

struct RunConfig {
  Command command = Command::predict;
  int dimension = 1000;
  double xi = 20.0;
  int mu = 3;
  int lambda = 10;
  /// Defaults to 1/sqrt(2N) once N is known.
  double tau = 0.0;
  double sigma0 = 1e-4;
  double x0 = 100.0;
  double r0 = 1.0;
  /// Full search point for `project`; its length fixes N.
  std::vector<double> point;
  std::int64_t trials = 100000;
  int runs = 20;
  std::int64_t generations = 0;  ///< defaults to 50 N
  double burn_in = 0.5;          ///< fraction of generations
  std::uint64_t seed = 1;
  /// -inf disables the target; `steady` defaults to that.
  double f_target = 1e-30;
  int threads = 0;
  ParentAnchor parent = ParentAnchor::boundary;
  std::vector<double> sigma_star_grid{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  /// Empty: stdout, or <$CONESA_OUTPUT_DIR>/<command>.csv when set.
  std::string output;
};

/// Invalid arguments; what() lists every offending field.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Help was requested (or argv was empty); what() holds the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// args excludes the program name.
RunConfig parse_config(const std::vector<std::string>& args);

/// Resolved arguments that reproduce the run (output path and thread count
/// omitted), starting with the subcommand.
std::vector<std::string> canonical_arguments(const RunConfig& config);

/// Runs the command and writes the CSV to out.
void dispatch(const RunConfig& config, std::ostream& out);

/// Full front end: parse, dispatch, write to the configured destination.
/// Returns 0 (ok), 1 (usage) or 2 (runtime failure).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* command_name(Command command);

/// Shortest decimal that reads back to the same double.
std::string format_double(double value);

}  // namespace conesa::cli
