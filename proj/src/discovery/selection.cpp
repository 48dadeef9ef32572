#include "libmig/discovery/selection.hpp"

#include <map>

#include <spdlog/spdlog.h>

#include "libmig/common/fs.hpp"
#include "libmig/discovery/imports.hpp"
#include "libmig/error.hpp"

namespace libmig::discovery {

std::vector<std::string> Selection::paths() const {
  std::vector<std::string> out;
  for (const auto& f : files) out.push_back(f.path);
  return out;
}

Selection select_migration_files(const std::filesystem::path& project_root, const CallGraph& graph,
                                 const ImportNameSet& source_names,
                                 const std::vector<std::filesystem::path>& skip) {
  auto root = fs::normalize(project_root);
  std::map<std::string, SelectedFile> hits;
  Selection out;

  for (const auto& rel : fs::list_python_files(root, skip)) {
    try {
      if (scan_imports(fs::read_file(root / rel), source_names).empty()) continue;
    } catch (const Error& e) {
      spdlog::warn("[discovery] {}: {}", rel, e.what());
      out.unparsable.push_back(rel);
      continue;
    }
    hits[rel].static_hit = true;
  }

  for (const auto& e : graph.edges()) {
    const auto& caller = graph.node(e.caller);
    const auto& callee = graph.node(e.callee);
    if (caller.owner.kind != OwnerKind::Project || callee.owner.kind != OwnerKind::Library) continue;
    if (!source_names.contains(callee.owner.import_name)) continue;
    auto rel = fs::relative_to(caller.file, root);
    if (rel.empty()) continue;
    hits[rel].dynamic_hit = true;
  }

  for (auto& [rel, f] : hits) {
    if (fs::is_test_file(rel)) {
      out.excluded_tests.push_back(rel);
      continue;
    }
    f.path = rel;
    out.files.push_back(f);
  }
  return out;
}

}  // namespace libmig::discovery
