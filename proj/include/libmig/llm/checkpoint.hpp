#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "libmig/prep/test_report.hpp"

namespace libmig::llm {

/// Contents of the files a stage overwrote, as they were before it ran.
struct FileCheckpoint {
  Stage stage = Stage::LlmMig;
  std::map<std::string, std::string> files;  // relative path -> previous text
  std::set<std::string> created;             // paths that did not exist before
};

/// Writes each file (temp file + rename) and returns what was there before.
/// Paths are relative to project_root and must already exist unless
/// `allow_new`. On a failed write every file already replaced is put back
/// before Error(WriteFailed) propagates.
FileCheckpoint apply_migrated_files(const std::filesystem::path& project_root,
                                    const std::map<std::string, std::string>& migrated,
                                    Stage stage = Stage::LlmMig, bool allow_new = false);

/// Puts back every file recorded in `checkpoint` and removes created ones.
void restore_checkpoint(const std::filesystem::path& project_root, const FileCheckpoint& checkpoint);

/// Persists under `dir`: checkpoint.json plus a copy of each file.
void save_checkpoint(const FileCheckpoint& checkpoint, const std::filesystem::path& dir);
FileCheckpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace libmig::llm
