#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace maglev::cli {

// Exit codes, documented in --help:
//   0 success, 2 config/usage error, 3 fit or convergence error,
//   4 tolerance failure (table-check), 1 unexpected internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitFit = 3;
inline constexpr int kExitTolerance = 4;

struct GlobalOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out_dir;  // overrides [outputs] directory
  std::string format;                            // "", "text" or "json"
  std::optional<uint64_t> seed;                  // overrides [noise] seed
  double tolerance = 0.05;                       // table-check
  std::optional<std::filesystem::path> input;    // analyze / ringdown
};

struct PressureArgs {
  std::optional<double> gauge_mbar;
  std::optional<double> warm_k;
  std::optional<double> cold_k;
};

int cmd_simulate(const GlobalOptions& opt);
int cmd_analyze(const GlobalOptions& opt);
int cmd_ringdown(const GlobalOptions& opt);
int cmd_limits(const GlobalOptions& opt);
int cmd_coil_optimize(const GlobalOptions& opt);
int cmd_table_check(const GlobalOptions& opt);
int cmd_pressure_correct(const GlobalOptions& opt, const PressureArgs& args);

/// Maps an exception thrown by a command into the documented exit code.
int exit_code_for_current_exception();

}  // namespace maglev::cli
