#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "libmig/discovery/wheel.hpp"
#include "libmig/merge/diff.hpp"

namespace libmig::merge {

enum class Verdict { Skipped, NotSkipped };

enum class HunkReason { Small, HasAdditionsOrSourceApi, Below90PctRemoval, ClassifiedSkipped };

std::string_view to_string(Verdict v);
std::string_view to_string(HunkReason r);

struct HunkClass {
  Verdict verdict;
  HunkReason reason;

  bool operator==(const HunkClass&) const = default;
};

/// Band rule over removals r and additions a:
///   r <= 9            not skipped (small)
///   10 <= r <= 19     skipped iff a == 0 and no source reference
///   r >= 20           skipped iff r / (r + a) >= 0.9 and no source reference
HunkClass classify_hunk(std::size_t removals, std::size_t additions, bool source_reference);

/// `reference_names` are the identifiers that reach the source library (see
/// discovery::library_reference_names); a removed line containing one as a
/// token counts as a source reference.
HunkClass classify_hunk(const DiffHunk& hunk, const std::set<std::string>& reference_names);

struct ClassifiedHunk {
  DiffHunk hunk;
  HunkClass cls;
};

std::vector<ClassifiedHunk> classify_hunks(std::string_view original, std::string_view migrated,
                                           const discovery::ImportNameSet& source_names);

bool any_skipped(const std::vector<ClassifiedHunk>& hunks);

struct MergeResult {
  std::string text;
  std::size_t merged_hunks = 0;
  std::vector<std::string> warnings;
};

/// Re-inserts the removed lines of every skipped hunk into `migrated` in
/// front of the line at new_start, last hunk first. Never alters a migrated
/// line, except for giving a final unterminated line its newline when code
/// is appended after it. Throws Error(InsertOutOfRange) when a hunk does not
/// match the two texts.
MergeResult merge_skipped(std::string_view original, std::string_view migrated,
                          const std::vector<ClassifiedHunk>& hunks);

nlohmann::json to_json(const std::vector<ClassifiedHunk>& hunks);

}  // namespace libmig::merge
