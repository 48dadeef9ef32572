#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "libmig/prep/project_config.hpp"
#include "libmig/prep/spec.hpp"
#include "libmig/prep/test_report.hpp"
#include "libmig/prep/versions.hpp"

namespace libmig::prep {

/// A provisioned virtual environment.
struct EnvHandle {
  std::filesystem::path venv_path;
  std::string interpreter_version;
  std::filesystem::path site_packages_path;
  /// Normalized distribution name -> installed version.
  std::map<std::string, std::string> installed_packages;

  std::filesystem::path python() const;
  std::filesystem::path shim_path() const;
  std::optional<std::string> installed_version(std::string_view package) const;
};

struct ProvisionOptions {
  /// Interpreter used to create the venv. Empty: `python<version>` on PATH
  /// (or `python3` when no version was requested).
  std::string host_python;
  /// Packages the runner shim needs inside the venv.
  std::vector<std::string> support_packages{"pytest", "pprofile"};
  /// Extra arguments appended to every `pip install` (index URLs, --no-index, ...).
  std::vector<std::string> pip_args;
  /// Runner shim script copied into the venv.
  std::filesystem::path shim_source;
  /// When set together with `registry`, unpinned requirements are pinned to
  /// the release current on this date before installation.
  std::optional<Date> reference_date;
  ReleaseHistory* registry = nullptr;
  std::chrono::milliseconds install_timeout{std::chrono::minutes(30)};
};

/// Creates (or reuses) `<out_dir>/venv`, installs each requirements file in
/// order, the target library at its version and the shim support packages.
/// Throws Error(InterpreterMissing) or InstallError.
EnvHandle provision_environment(const MigrationSpec& spec, const ProvisionOptions& options);

/// `pip install` into an existing environment and refresh its package map.
void install_packages(EnvHandle& env, const std::vector<std::string>& requirements,
                      const ProvisionOptions& options);

/// Re-reads the installed distribution map of `env`.
void refresh_installed(EnvHandle& env);

struct RunOptions {
  std::chrono::milliseconds timeout{std::chrono::minutes(15)};
  ProjectConfig config;
  /// Where the JUnit report and profile are written.
  std::filesystem::path artifacts_dir;
};

struct TestRun {
  TestReport report;
  std::optional<std::filesystem::path> profile;
  std::filesystem::path report_path;
  std::string output;
};

/// Runs the shim inside the venv with `project_root` as working directory.
/// Throws Error(RunnerCrashed) when no report appears (including timeouts) and
/// Error(NoTestsCollected) when the suite is empty.
TestRun run_tests(const EnvHandle& env, const std::filesystem::path& project_root, Stage stage,
                  bool with_profiling, const RunOptions& options);

/// Package name pip complained about in `output`, if any.
std::optional<std::string> failed_package_from_pip_output(std::string_view output);

}  // namespace libmig::prep
