#pragma once

// Subcommand driver shared by the barylab executable and the tests.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "barylab/sampling.hpp"

namespace barylab {

enum ExitCode : int { exit_pass = 0, exit_fail = 1, exit_usage = 2, exit_budget = 3 };

/// A builtin by name with its parameter object, or a tabulated-function file.
struct FunctionSource {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  std::string table_path;

  bool empty() const noexcept { return name.empty() && table_path.empty(); }
};

struct RunConfig {
  /// check | equiv | factorize | construct | enumerate | probe | eval
  std::string command;
  FunctionSource fn;
  std::vector<std::string> props;
  SearchConfig search;
  std::string output_path;

  /// eval: atoms separated by ',', strings by ';', or a JSON array of strings.
  std::string input;

  /// construct: M^z sections when set, otherwise the sections of fn.
  std::optional<double> sections_z;
  std::string side = "r";
  std::size_t max_arity = 4;
  std::optional<std::size_t> tail_cutoff;
  nlohmann::json tail_constant;

  /// enumerate / probe
  nlohmann::json domain = nlohmann::json::array();
  std::vector<std::string> filter;
  std::string tables_dir;
  std::string problem;
};

struct RunOutcome {
  int exit_code = exit_pass;
  /// The report (JSON for every command except eval).
  std::string output;
};

/// Executes one command. Usage and configuration errors come back as
/// exit_usage with a JSON error object.
RunOutcome run(const RunConfig& cfg);

/// Parses argv, applies BARYLAB_BUDGET, runs and writes the report to `out`
/// or to --out. Returns the process exit code.
int run_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace barylab
