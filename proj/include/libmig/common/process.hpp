#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace libmig {

struct ProcessOptions {
  std::filesystem::path cwd;
  /// Added to (or overriding) the inherited environment.
  std::map<std::string, std::string> env;
  std::optional<std::chrono::milliseconds> timeout;
};

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  /// Interleaved stdout and stderr.
  std::string output;
};

/// Runs argv[0] (looked up on PATH when it has no slash) and waits for it.
/// On timeout the whole process group is killed.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const ProcessOptions& options = {});

/// First executable named `name` on PATH.
std::optional<std::filesystem::path> find_on_path(const std::string& name);

}  // namespace libmig
