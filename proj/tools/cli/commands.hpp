#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace gwshm::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitComputation = 3,
  kExitIo = 4,
};

/// Output files are staged in memory and only written once every computation
/// has succeeded, so a failing command leaves the output tree untouched.
struct OutputSet {
  struct File {
    std::filesystem::path path;  // relative to the output directory
    std::string text;
  };
  std::vector<File> files;

  void add(std::filesystem::path path, std::string text);
  void write(const std::filesystem::path& root) const;
};

OutputSet cmd_psd(const RunConfig& config);
OutputSet cmd_detect(const RunConfig& config);
OutputSet cmd_roc(const RunConfig& config);
OutputSet cmd_simulate(const RunConfig& config);
OutputSet cmd_report(const RunConfig& config);

/// Full command-line entry point: parses argv, runs the subcommand, writes its
/// files and maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gwshm::cli
