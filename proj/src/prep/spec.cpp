#include "libmig/prep/spec.hpp"

#include "libmig/common/text.hpp"
#include "libmig/error.hpp"

namespace libmig::prep {

namespace {
void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::Validation, message);
}
}  // namespace

void validate(const MigrationSpec& spec) {
  namespace stdfs = std::filesystem;
  require(!spec.project_root.empty() && stdfs::is_directory(spec.project_root),
          "project root is not a directory: " + spec.project_root.string());
  require(!text::trim(spec.source_lib).empty(), "source library is empty");
  require(!text::trim(spec.target_lib).empty(), "target library is empty");
  require(!text::trim(spec.target_version).empty(), "target version is empty");
  require(text::normalize_package_name(spec.source_lib) !=
              text::normalize_package_name(spec.target_lib),
          "source and target library are the same package");
  require(!spec.requirements_files.empty(), "at least one requirements file is required");
  for (const auto& r : spec.requirements_files)
    require(stdfs::is_regular_file(r), "requirements file not found: " + r.string());
  require(!spec.model_id.empty(), "model id is empty");
  require(!spec.api_base_url.empty(), "API base URL is empty");
  require(!spec.out_dir.empty(), "output directory is empty");
  if (spec.python_version) require(!spec.python_version->empty(), "python version is empty");
}

}  // namespace libmig::prep
