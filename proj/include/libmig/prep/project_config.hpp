#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace libmig::prep {

/// Per-project overrides read from `<out_dir>/project.toml`:
///
///     test_args = -x tests/unit
///     timeout_s = 600
///     [env]
///     DJANGO_SETTINGS_MODULE = "app.settings"
struct ProjectConfig {
  std::vector<std::string> test_args;
  std::map<std::string, std::string> env;
  std::optional<std::chrono::seconds> timeout;
};

/// Throws Error(Validation) on unknown keys or malformed lines.
ProjectConfig parse_project_config(std::string_view text);

/// Defaults when the file does not exist.
ProjectConfig load_project_config(const std::filesystem::path& out_dir);

}  // namespace libmig::prep
