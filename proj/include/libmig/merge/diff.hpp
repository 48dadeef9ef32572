#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace libmig::merge {

/// One contiguous change region. Lines keep their terminators.
/// old_start is 1 + the number of original lines before the hunk and
/// new_start is 1 + the number of migrated lines before it, so a pure
/// insertion or deletion still points at the line where it happens.
struct DiffHunk {
  int old_start = 1;
  std::vector<std::string> old_lines;
  int new_start = 1;
  std::vector<std::string> new_lines;

  bool operator==(const DiffHunk&) const = default;
};

/// Minimal line diff (Myers, linear space).
std::vector<DiffHunk> diff_lines(const std::vector<std::string>& original,
                                 const std::vector<std::string>& migrated);
std::vector<DiffHunk> diff_files(std::string_view original, std::string_view migrated);

/// Replays hunks against `original`. Throws Error(InsertOutOfRange) when a
/// hunk does not match the text.
std::string apply_hunks(std::string_view original, const std::vector<DiffHunk>& hunks);

/// Removed plus added lines.
std::size_t changed_lines(const std::vector<DiffHunk>& hunks);

/// Unified-diff rendering with `context` lines around each hunk.
std::string unified_diff(std::string_view original, std::string_view migrated, std::string_view from_name,
                         std::string_view to_name, int context = 3);

}  // namespace libmig::merge
