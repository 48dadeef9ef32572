#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "libmig/discovery/selection.hpp"
#include "libmig/prep/spec.hpp"
#include "libmig/report/metrics.hpp"

namespace libmig::report {

struct FileFailure {
  std::string path;
  std::string error;  // ErrorKind name
  std::string message;
};

/// Persisted outcome of one run. Carries no timestamps or run ids so two runs
/// over the same inputs serialize identically.
struct MigrationRunReport {
  prep::MigrationSpec spec;
  std::string source_version;
  std::vector<std::string> source_import_names;
  std::vector<discovery::SelectedFile> selected_files;
  std::vector<StageCorrectness> per_stage;
  std::optional<Status> status;
  std::optional<std::size_t> migloc_auto;
  std::optional<std::size_t> migloc_manual;
  std::optional<Effort> effort;
  std::vector<std::string> warnings;
  std::vector<FileFailure> file_failures;
};

nlohmann::json to_json(const StageCorrectness& stage);
nlohmann::json to_json(const MigrationRunReport& report);

}  // namespace libmig::report
