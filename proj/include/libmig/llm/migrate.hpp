#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "libmig/error.hpp"
#include "libmig/llm/client.hpp"

namespace libmig::llm {

struct MigrationRequest {
  std::string source_lib;
  std::string source_version;
  std::string target_lib;
  std::string target_version;
};

/// Result for one file. A failed file keeps `error` set and no `code`.
struct FileMigration {
  std::string path;
  std::string prompt;
  std::optional<std::string> response;
  std::optional<std::string> code;
  std::optional<ErrorKind> error;
  std::string message;
};

/// Runs one request per file with at most `parallel` in flight. Results come
/// back in the order of `files`. Extracted code gets the original's final
/// newline back when the model dropped it.
std::vector<FileMigration> migrate_files(const std::map<std::string, std::string>& files,
                                         const MigrationRequest& request, const CompletionFn& complete,
                                         unsigned parallel = 4);

}  // namespace libmig::llm
