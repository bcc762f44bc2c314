#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fbp::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

struct GlobalOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;  // 0: hardware concurrency
  bool verbose = false;
};

int cmd_simulate(const GlobalOptions& opts);
int cmd_fit(const GlobalOptions& opts);
int cmd_backtest(const GlobalOptions& opts);
int cmd_murphy(const GlobalOptions& opts);
int cmd_msis_batch(const GlobalOptions& opts);

// Parses argv, dispatches and maps errors to exit codes.
int run(int argc, char** argv);

}  // namespace fbp::cli
