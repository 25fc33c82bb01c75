#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace afrelay::cli {

// Exit codes: 0 success, 2 infeasible, 3 numerical failure, 4 I/O or config.
constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config_path;
  std::string design_path;   // evaluate only
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int samples = 1000;        // evaluate: error-ball draws
  int verbosity = 1;         // 0 quiet, 1 normal, 2 debug
  double inner_bias = 0.0;   // oracle-check self-test hook
};

int cmd_design(const Options& options);
int cmd_evaluate(const Options& options);
int cmd_sweep(const Options& options);
int cmd_oracle_check(const Options& options);

/// Full argv-level entry point used by the binary.
int run(int argc, const char* const* argv);

}  // namespace afrelay::cli
