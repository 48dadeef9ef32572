#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace libmig::discovery {

/// One `calls=` group of a CallGrind profile with names expanded.
struct CallRecord {
  std::string caller_file;
  std::string caller_function;
  std::string callee_file;
  std::string callee_function;
  int line = 0;  // call-site line in the caller's file
  long count = 1;

  bool operator==(const CallRecord&) const = default;
};

/// Parses the CallGrind subset used between the runner shim and this tool:
/// header lines, `fl=`/`fi=`/`fe=`, `fn=`, `cfl=`/`cfi=`, `cfn=`, `calls=` and
/// position/cost lines, with `(N)` name compression and relative (`+N`, `-N`,
/// `*`) positions. Throws ProfileError with the offending 1-based line.
std::vector<CallRecord> parse_callgrind(std::string_view profile_text);

/// Renders records as CallGrind text that parse_callgrind reads back verbatim.
std::string write_callgrind(const std::vector<CallRecord>& records,
                            std::string_view creator = "libmig");

}  // namespace libmig::discovery
