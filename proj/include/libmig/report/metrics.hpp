#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "libmig/prep/test_report.hpp"

namespace libmig::report {

/// Exact fraction num/den with den > 0.
struct Ratio {
  std::size_t num = 0;
  std::size_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string exact() const;    // "1/4"
  std::string percent() const;  // "25.00%", rounded half up

  bool operator==(const Ratio& o) const { return num * o.den == o.num * den; }
  auto operator<=>(const Ratio& o) const { return num * o.den <=> o.num * den; }
};

struct StageCorrectness {
  Stage stage = Stage::LlmMig;
  std::size_t baseline_passing = 0;
  std::size_t still_passing = 0;
  std::optional<Ratio> correctness;  // absent when nothing passed at baseline
  bool inherited = false;            // stage did not run; echoes the previous one
};

/// Share of tests passing in `premig` that also pass in `post`. Tests missing
/// from `post` count as not passing; tests new in `post` are ignored.
/// Throws Error(NoBaselinePassingTests).
StageCorrectness compare_reports(const TestReport& premig, const TestReport& post);

enum class Status { Correct, PartiallyCorrect, Incorrect };

std::string_view to_string(Status s);

Status determine_status(const Ratio& correctness);
/// Throws Error(NoBaselinePassingTests) when correctness is undefined.
Status determine_status(const StageCorrectness& final_stage);

/// Removed plus added lines over all files; a file missing on one side
/// diffs against the empty text.
std::size_t count_mig_loc(const std::map<std::string, std::string>& before,
                          const std::map<std::string, std::string>& after);

struct Effort {
  double automatic;
  double manual;
};

/// manual / (auto + manual) and auto / (auto + manual). Throws Error(ZeroTotal).
Effort compute_effort(std::size_t migloc_auto, std::size_t migloc_manual);

}  // namespace libmig::report
