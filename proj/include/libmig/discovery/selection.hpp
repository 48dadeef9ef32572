#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "libmig/discovery/call_graph.hpp"
#include "libmig/discovery/wheel.hpp"

namespace libmig::discovery {

struct SelectedFile {
  std::string path;  // relative to the project root, '/' separated
  bool static_hit = false;
  bool dynamic_hit = false;

  bool operator==(const SelectedFile&) const = default;
};

struct Selection {
  std::vector<SelectedFile> files;         // lexicographic by path
  std::vector<std::string> unparsable;     // skipped by the static branch
  std::vector<std::string> excluded_tests; // would have matched, but are test files

  std::vector<std::string> paths() const;
};

/// Project files that reference the source library: statically through an
/// import, or dynamically through a project-owned caller with an edge into
/// one of `source_names`. Test files are never selected.
Selection select_migration_files(const std::filesystem::path& project_root, const CallGraph& graph,
                                 const ImportNameSet& source_names,
                                 const std::vector<std::filesystem::path>& skip = {});

}  // namespace libmig::discovery
