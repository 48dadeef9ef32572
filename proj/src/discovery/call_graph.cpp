#include "libmig/discovery/call_graph.hpp"

#include <algorithm>
#include <cctype>

#include "libmig/common/fs.hpp"

namespace libmig::discovery {

std::string_view to_string(OwnerKind kind) {
  switch (kind) {
    case OwnerKind::Project: return "project";
    case OwnerKind::System: return "system";
    case OwnerKind::Library: return "library";
  }
  return "system";
}

std::size_t CallGraph::add_node(FunctionRef ref) {
  auto key = std::make_pair(ref.file, ref.qualname);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  nodes_.push_back(std::move(ref));
  index_.emplace(std::move(key), nodes_.size() - 1);
  return nodes_.size() - 1;
}

void CallGraph::add_edge(std::size_t caller, std::size_t callee, int line) {
  auto key = std::make_tuple(caller, callee, line);
  if (edge_index_.count(key)) return;
  edge_index_.emplace(key, edges_.size());
  edges_.push_back(CallEdge{caller, callee, line});
}

std::optional<std::size_t> CallGraph::find(std::string_view file, std::string_view qualname) const {
  auto it = index_.find(std::make_pair(std::string(file), std::string(qualname)));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> CallGraph::find_terminal(std::string_view file, std::string_view name) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.file != file) continue;
    const auto& q = n.qualname;
    if (q == name || (q.size() > name.size() && q.ends_with(name) && q[q.size() - name.size() - 1] == '.'))
      out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> CallGraph::callers_of(std::size_t callee) const {
  std::vector<std::size_t> out;
  for (const auto& e : edges_)
    if (e.callee == callee) out.push_back(e.caller);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

bool is_marker(std::string_view file) {
  return file.empty() || file == "~" || (file.front() == '<' && file.back() == '>');
}

std::string module_name(std::string_view segment) {
  // "yaml" stays, "six.py" -> "six", "_yaml.cpython-311-x86_64-linux-gnu.so" -> "_yaml"
  auto dot = segment.find('.');
  return std::string(dot == std::string_view::npos ? segment : segment.substr(0, dot));
}

}  // namespace

Owner classify_owner(std::string_view file, const std::filesystem::path& project_root,
                     const std::filesystem::path& site_packages) {
  if (is_marker(file)) return Owner{OwnerKind::System, {}};
  std::filesystem::path p(file);
  if (p.is_relative()) p = project_root / p;
  p = fs::normalize(p);
  if (!site_packages.empty() && fs::is_under(p, site_packages)) {
    auto rel = fs::relative_to(p, site_packages);
    auto first = rel.substr(0, rel.find('/'));
    if (!first.empty()) return Owner{OwnerKind::Library, module_name(first)};
    return Owner{OwnerKind::System, {}};
  }
  if (fs::is_under(p, project_root)) return Owner{OwnerKind::Project, {}};
  return Owner{OwnerKind::System, {}};
}

std::string profiler_qualname(std::string_view function) {
  auto colon = function.rfind(':');
  if (colon != std::string_view::npos && colon + 1 < function.size() &&
      std::all_of(function.begin() + static_cast<long>(colon) + 1, function.end(),
                  [](unsigned char c) { return std::isdigit(c); }))
    function = function.substr(0, colon);
  return std::string(function);
}

CallGraph build_call_graph(const std::vector<CallRecord>& records, const OwnerClassifier& classify,
                           const std::filesystem::path& base) {
  CallGraph g;
  auto file_key = [&](const std::string& file) {
    if (is_marker(file)) return file;
    std::filesystem::path p(file);
    if (p.is_relative() && !base.empty()) p = base / p;
    return fs::normalize(p).generic_string();
  };
  auto node = [&](const std::string& file, const std::string& function) {
    auto key = file_key(file);
    auto owner = classify(key);
    return g.add_node(FunctionRef{key, profiler_qualname(function), std::move(owner)});
  };
  for (const auto& r : records) {
    auto caller = node(r.caller_file, r.caller_function);
    auto callee = node(r.callee_file, r.callee_function);
    g.add_edge(caller, callee, r.line);
  }
  return g;
}

}  // namespace libmig::discovery
