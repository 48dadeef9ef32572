#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "libmig/discovery/wheel.hpp"
#include "libmig/pysrc/module.hpp"

namespace libmig::discovery {

/// An import binding whose top-level module belongs to a library.
struct ImportHit {
  int line;
  std::string module;  // imported module ("yaml.loader")
  std::string member;  // for from-imports
  std::string bound;   // local name bound by the statement

  auto operator<=>(const ImportHit&) const = default;
};

/// Every import binding (plain, from-import, aliased; at any nesting level)
/// whose top-level module is one of `names`. Throws Error(SyntaxUnparsable).
std::set<ImportHit> scan_imports(std::string_view source, const ImportNameSet& names);
std::set<ImportHit> scan_imports(const pysrc::Module& module, const ImportNameSet& names);

/// Names through which `source` can reach the library: the import names
/// themselves plus every local name bound by a matching import.
std::set<std::string> library_reference_names(std::string_view source, const ImportNameSet& names);

}  // namespace libmig::discovery
