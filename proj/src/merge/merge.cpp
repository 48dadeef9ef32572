#include "libmig/merge/merge.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "libmig/common/text.hpp"
#include "libmig/discovery/imports.hpp"
#include "libmig/error.hpp"

namespace libmig::merge {

std::string_view to_string(Verdict v) { return v == Verdict::Skipped ? "skipped" : "not_skipped"; }

std::string_view to_string(HunkReason r) {
  switch (r) {
    case HunkReason::Small: return "small";
    case HunkReason::HasAdditionsOrSourceApi: return "has_additions_or_source_api";
    case HunkReason::Below90PctRemoval: return "below_90pct_removal";
    case HunkReason::ClassifiedSkipped: return "classified_skipped";
  }
  return "small";
}

HunkClass classify_hunk(std::size_t r, std::size_t a, bool source_reference) {
  if (r <= 9) return {Verdict::NotSkipped, HunkReason::Small};
  if (r <= 19) {
    if (a > 0 || source_reference) return {Verdict::NotSkipped, HunkReason::HasAdditionsOrSourceApi};
    return {Verdict::Skipped, HunkReason::ClassifiedSkipped};
  }
  // r / (r + a) >= 0.9  <=>  r >= 9a
  if (r < 9 * a) return {Verdict::NotSkipped, HunkReason::Below90PctRemoval};
  if (source_reference) return {Verdict::NotSkipped, HunkReason::HasAdditionsOrSourceApi};
  return {Verdict::Skipped, HunkReason::ClassifiedSkipped};
}

HunkClass classify_hunk(const DiffHunk& hunk, const std::set<std::string>& reference_names) {
  bool reference = std::any_of(hunk.old_lines.begin(), hunk.old_lines.end(), [&](const std::string& line) {
    for (auto tok : text::identifier_tokens(line))
      if (reference_names.count(std::string(tok))) return true;
    return false;
  });
  return classify_hunk(hunk.old_lines.size(), hunk.new_lines.size(), reference);
}

std::vector<ClassifiedHunk> classify_hunks(std::string_view original, std::string_view migrated,
                                           const discovery::ImportNameSet& source_names) {
  auto names = discovery::library_reference_names(original, source_names);
  std::vector<ClassifiedHunk> out;
  for (auto& h : diff_files(original, migrated)) {
    auto cls = classify_hunk(h, names);
    out.push_back({std::move(h), cls});
  }
  return out;
}

bool any_skipped(const std::vector<ClassifiedHunk>& hunks) {
  return std::any_of(hunks.begin(), hunks.end(),
                     [](const ClassifiedHunk& h) { return h.cls.verdict == Verdict::Skipped; });
}

MergeResult merge_skipped(std::string_view original, std::string_view migrated,
                          const std::vector<ClassifiedHunk>& hunks) {
  auto old_text = text::split_lines(original);
  auto lines = text::split_lines(migrated);
  MergeResult result;

  for (const auto& [h, _] : hunks) {
    auto os = static_cast<std::size_t>(std::max(h.old_start, 1) - 1);
    auto ns = static_cast<std::size_t>(std::max(h.new_start, 1) - 1);
    bool old_ok = h.old_start >= 1 && os + h.old_lines.size() <= old_text.size() &&
                  std::equal(h.old_lines.begin(), h.old_lines.end(), old_text.begin() + static_cast<long>(os));
    bool new_ok = h.new_start >= 1 && ns + h.new_lines.size() <= lines.size() &&
                  std::equal(h.new_lines.begin(), h.new_lines.end(), lines.begin() + static_cast<long>(ns));
    if (!old_ok || (!new_ok && ns <= lines.size()))
      throw Error(ErrorKind::InsertOutOfRange,
                  fmt::format("hunk -{} +{} does not match the texts", h.old_start, h.new_start));
  }

  std::vector<const ClassifiedHunk*> order;
  for (const auto& h : hunks)
    if (h.cls.verdict == Verdict::Skipped) order.push_back(&h);
  std::stable_sort(order.begin(), order.end(),
                   [](const ClassifiedHunk* x, const ClassifiedHunk* y) { return x->hunk.new_start > y->hunk.new_start; });

  auto nl = std::string(text::detect_newline(migrated.empty() ? original : migrated));
  for (const auto* ch : order) {
    const auto& h = ch->hunk;
    auto at = static_cast<std::size_t>(h.new_start - 1);
    if (at > lines.size()) {
      result.warnings.push_back(
          fmt::format("skipped hunk at line {} lies past the end of the migrated file; appended", h.new_start));
      at = lines.size();
    }
    if (at == lines.size() && !lines.empty() && !lines.back().ends_with('\n')) lines.back() += nl;
    lines.insert(lines.begin() + static_cast<long>(at), h.old_lines.begin(), h.old_lines.end());
    ++result.merged_hunks;
  }
  result.text = text::join(lines);
  return result;
}

nlohmann::json to_json(const std::vector<ClassifiedHunk>& hunks) {
  auto arr = nlohmann::json::array();
  for (const auto& [h, c] : hunks) {
    arr.push_back({
        {"old_start", h.old_start},
        {"removed", h.old_lines.size()},
        {"new_start", h.new_start},
        {"added", h.new_lines.size()},
        {"verdict", to_string(c.verdict)},
        {"reason", to_string(c.reason)},
    });
  }
  return arr;
}

}  // namespace libmig::merge
