#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "libmig/discovery/callgrind.hpp"

namespace libmig::discovery {

enum class OwnerKind { Project, System, Library };

std::string_view to_string(OwnerKind kind);

struct Owner {
  OwnerKind kind = OwnerKind::System;
  std::string import_name;  // set iff kind == Library

  bool operator==(const Owner&) const = default;
};

struct FunctionRef {
  std::string file;      // absolute path or an angle-bracketed marker
  std::string qualname;  // dotted, unique within file
  Owner owner;

  bool operator==(const FunctionRef&) const = default;
};

struct CallEdge {
  std::size_t caller;  // node indices
  std::size_t callee;
  int line;
};

/// Functions seen by the profiler and who called whom from which line.
/// Nodes are keyed by (file, qualname); edges are deduplicated per
/// (caller, callee, line).
class CallGraph {
 public:
  std::size_t add_node(FunctionRef ref);
  void add_edge(std::size_t caller, std::size_t callee, int line);

  const std::vector<FunctionRef>& nodes() const { return nodes_; }
  const std::vector<CallEdge>& edges() const { return edges_; }
  const FunctionRef& node(std::size_t i) const { return nodes_.at(i); }

  std::optional<std::size_t> find(std::string_view file, std::string_view qualname) const;
  /// Nodes in `file` whose qualname is `qualname` or ends in "." + `qualname`.
  std::vector<std::size_t> find_terminal(std::string_view file, std::string_view name) const;

  std::vector<std::size_t> callers_of(std::size_t callee) const;

 private:
  std::vector<FunctionRef> nodes_;
  std::map<std::pair<std::string, std::string>, std::size_t, std::less<>> index_;
  std::vector<CallEdge> edges_;
  std::map<std::tuple<std::size_t, std::size_t, int>, std::size_t> edge_index_;
};

/// Angle-bracketed markers and anything outside the project and
/// site-packages are `system`; files below site-packages belong to the
/// library named by their first path segment; files below the project root
/// are `project`. site-packages wins when the environment lives inside the
/// project.
Owner classify_owner(std::string_view file, const std::filesystem::path& project_root,
                     const std::filesystem::path& site_packages);

using OwnerClassifier = std::function<Owner(std::string_view file)>;

/// Strips a trailing ":<line>" that some profilers append to function names.
std::string profiler_qualname(std::string_view function);

/// Builds the graph from parsed records. Relative file names are resolved
/// against `base` when given.
CallGraph build_call_graph(const std::vector<CallRecord>& records, const OwnerClassifier& classify,
                           const std::filesystem::path& base = {});

}  // namespace libmig::discovery
