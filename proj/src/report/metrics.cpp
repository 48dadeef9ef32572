#include "libmig/report/metrics.hpp"

#include <set>

#include <fmt/format.h>

#include "libmig/error.hpp"
#include "libmig/merge/diff.hpp"

namespace libmig::report {

std::string Ratio::exact() const { return fmt::format("{}/{}", num, den); }

std::string Ratio::percent() const {
  // hundredths of a percent, rounded half up
  auto h = (num * 20000 + den) / (2 * den);
  return fmt::format("{}.{:02}%", h / 100, h % 100);
}

StageCorrectness compare_reports(const TestReport& premig, const TestReport& post) {
  StageCorrectness sc;
  sc.stage = post.stage;
  for (const auto& [id, outcome] : premig.outcomes) {
    if (outcome != Outcome::Pass) continue;
    ++sc.baseline_passing;
    auto it = post.outcomes.find(id);
    if (it != post.outcomes.end() && it->second == Outcome::Pass) ++sc.still_passing;
  }
  if (sc.baseline_passing == 0)
    throw Error(ErrorKind::NoBaselinePassingTests, "no test passed before migration");
  sc.correctness = Ratio{sc.still_passing, sc.baseline_passing};
  return sc;
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Correct: return "correct";
    case Status::PartiallyCorrect: return "partially_correct";
    case Status::Incorrect: return "incorrect";
  }
  return "incorrect";
}

Status determine_status(const Ratio& c) {
  if (c.num == 0) return Status::Incorrect;
  if (c.num >= c.den) return Status::Correct;
  return Status::PartiallyCorrect;
}

Status determine_status(const StageCorrectness& final_stage) {
  if (!final_stage.correctness)
    throw Error(ErrorKind::NoBaselinePassingTests, "correctness undefined without baseline passing tests");
  return determine_status(*final_stage.correctness);
}

std::size_t count_mig_loc(const std::map<std::string, std::string>& before,
                          const std::map<std::string, std::string>& after) {
  std::set<std::string> paths;
  for (const auto& [p, _] : before) paths.insert(p);
  for (const auto& [p, _] : after) paths.insert(p);
  std::size_t total = 0;
  for (const auto& p : paths) {
    auto b = before.find(p);
    auto a = after.find(p);
    std::string_view bt = b == before.end() ? std::string_view{} : std::string_view(b->second);
    std::string_view at = a == after.end() ? std::string_view{} : std::string_view(a->second);
    if (bt != at) total += merge::changed_lines(merge::diff_files(bt, at));
  }
  return total;
}

Effort compute_effort(std::size_t migloc_auto, std::size_t migloc_manual) {
  auto total = migloc_auto + migloc_manual;
  if (total == 0) throw Error(ErrorKind::ZeroTotal, "no migration changes to apportion");
  auto t = static_cast<double>(total);
  return Effort{static_cast<double>(migloc_auto) / t, static_cast<double>(migloc_manual) / t};
}

}  // namespace libmig::report
