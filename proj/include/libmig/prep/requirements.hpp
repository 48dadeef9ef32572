#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "libmig/prep/versions.hpp"

namespace libmig::prep {

/// One logical line of a requirements file.
struct Requirement {
  std::string raw;        // the line as written, comments stripped
  std::string name;       // distribution name; empty for options/paths/URLs
  std::string extras;     // "[a,b]" including brackets
  std::string specifier;  // ">=1,<2"
  std::string marker;     // environment marker after ';'
  /// Editable installs, VCS/URL references, options and local paths go to
  /// the installer exactly as written.
  bool passthrough = false;

  std::optional<std::string> exact_pin() const;
};

std::vector<Requirement> parse_requirements(std::string_view text);

/// Re-emits requirements, pinning every named, non-exact requirement to the
/// release current on `reference_date`. Passthrough lines are kept verbatim.
std::string pin_requirements(const std::vector<Requirement>& reqs, const Date& reference_date,
                             ReleaseHistory& registry);

}  // namespace libmig::prep
