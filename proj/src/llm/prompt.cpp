#include "libmig/llm/prompt.hpp"

#include <fmt/format.h>

#include "libmig/error.hpp"

namespace libmig::llm {

namespace {

// {0} source lib, {1} source version, {2} target lib, {3} target version, {4} code
constexpr std::string_view kTemplate =
    "The following Python code currently uses the library {0} version {1}.\n"
    "Migrate this code to use the library {2} version {3} instead.\n"
    "\n"
    "**Instructions:**\n"
    "1. **Explain the Changes**: Begin the output with a brief explanation of the specific changes "
    "you made to migrate from \"{0}\" to \"{2}\".\n"
    "2. **Provide the Modified Code**: After the explanation, present the modified code. Provide the "
    "entire code after migration even if only a part of it is changed.\n"
    "\n"
    "**Important Guidelines**:\n"
    "- Only make changes directly related to migrating between \"{0}\" and \"{2}\".\n"
    "- Do not refactor, reformat, optimize, or alter the original coding style.\n"
    "- The code given to you is part of a larger application. Do not change the names of classes, "
    "functions, or variables, because it can break the application.\n"
    "\n"
    "Original code:\n"
    "{4}";

}  // namespace

MigrationPrompt build_prompt(std::string_view source_lib, std::string_view source_version,
                             std::string_view target_lib, std::string_view target_version,
                             std::string_view code) {
  if (source_lib.empty() || target_lib.empty())
    throw Error(ErrorKind::Validation, "prompt needs both library names");
  if (source_version.empty() || target_version.empty())
    throw Error(ErrorKind::Validation, "prompt needs both library versions");
  if (code.empty()) throw Error(ErrorKind::Validation, "prompt needs non-empty code");
  MigrationPrompt p{std::string(source_lib), std::string(source_version), std::string(target_lib),
                    std::string(target_version), std::string(code), {}};
  p.rendered = fmt::format(kTemplate, source_lib, source_version, target_lib, target_version, code);
  return p;
}

MigrationPrompt build_prompt(const prep::MigrationSpec& spec, std::string_view source_version,
                             std::string_view code) {
  return build_prompt(spec.source_lib, source_version, spec.target_lib, spec.target_version, code);
}

}  // namespace libmig::llm
