#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace libmig::prep {

/// Everything the user supplies for one migration job.
struct MigrationSpec {
  std::filesystem::path project_root;
  std::string source_lib;
  std::string target_lib;
  std::string target_version;
  std::optional<std::string> python_version;
  std::vector<std::filesystem::path> requirements_files;
  std::string model_id;
  std::string api_base_url;
  std::filesystem::path out_dir;
};

/// Throws Error(Validation) naming the first violated invariant.
void validate(const MigrationSpec& spec);

}  // namespace libmig::prep
