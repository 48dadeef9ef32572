#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace libmig {

enum class Stage { Premig, LlmMig, Merge, Async, Manual };

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view s);

enum class Outcome { Pass, Fail, Error, Skipped };

std::string_view to_string(Outcome outcome);

/// Test outcomes captured at one pipeline stage, keyed by "path::name".
struct TestReport {
  Stage stage = Stage::Premig;
  std::map<std::string, Outcome> outcomes;
  double wall_time_s = 0.0;
};

namespace prep {

/// Reads a JUnit-XML document (testsuites/testsuite/testcase with optional
/// failure/error/skipped children). A test id reported more than once keeps its
/// worst outcome (error > fail > skipped > pass), which folds pytest's separate
/// teardown-error entries into the test they belong to.
/// Throws Error(Validation) for malformed XML.
TestReport parse_junit_xml(std::string_view xml, Stage stage);

}  // namespace prep
}  // namespace libmig
