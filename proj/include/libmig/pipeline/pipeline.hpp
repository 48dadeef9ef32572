#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "libmig/error.hpp"
#include "libmig/llm/client.hpp"
#include "libmig/prep/environment.hpp"
#include "libmig/report/run_report.hpp"

namespace libmig::pipeline {

struct Options {
  prep::ProvisionOptions provision;
  llm::Endpoint endpoint;
  /// Overrides the HTTP client (scripted responses in tests).
  llm::CompletionFn completion;
  unsigned parallel = 4;
  std::optional<std::filesystem::path> manual_fixed;
  /// Empty: derived from the start time.
  std::string run_id;
  /// Skips wheel inspection when set.
  std::vector<std::string> source_import_names;
  std::chrono::milliseconds test_timeout{std::chrono::minutes(15)};
  std::string asyncio_package = "pytest-asyncio";
};

/// A stage error annotated with the stage it escaped from.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), "[" + stage + "] " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct RunResult {
  report::MigrationRunReport report;
  std::filesystem::path run_dir;
};

/// prep -> discovery -> llmmig -> merge -> async (-> manual) -> report.
/// The merge and async stages only run while the migration is not fully
/// correct and they have something to do. Artifacts land in
/// `<out_dir>/<run_id>/`; manifest.json is written even when a stage fails.
/// The project is migrated in place. Throws Error(Validation) for a bad spec
/// and StageError otherwise.
RunResult run_migration(const prep::MigrationSpec& spec, const Options& options);

}  // namespace libmig::pipeline
