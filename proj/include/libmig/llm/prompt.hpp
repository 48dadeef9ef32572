#pragma once

#include <string>
#include <string_view>

#include "libmig/prep/spec.hpp"

namespace libmig::llm {

struct MigrationPrompt {
  std::string source_lib;
  std::string source_version;
  std::string target_lib;
  std::string target_version;
  std::string code;
  std::string rendered;
};

/// Fills the migration template. Throws Error(Validation) when a library
/// name, a version or the code is empty.
MigrationPrompt build_prompt(std::string_view source_lib, std::string_view source_version,
                             std::string_view target_lib, std::string_view target_version,
                             std::string_view code);

MigrationPrompt build_prompt(const prep::MigrationSpec& spec, std::string_view source_version,
                             std::string_view code);

}  // namespace libmig::llm
