#include "libmig/asyncprop/async.hpp"

#include <deque>
#include <tuple>

#include <fmt/format.h>

#include "libmig/common/fs.hpp"
#include "libmig/error.hpp"

namespace libmig::asyncprop {

namespace {

std::string_view terminal(std::string_view qualname) {
  auto dot = qualname.rfind('.');
  return dot == std::string_view::npos ? qualname : qualname.substr(dot + 1);
}

bool is_pseudo(std::string_view qualname) {
  auto t = terminal(qualname);
  return !t.empty() && t.front() == '<' && t.back() == '>';
}

}  // namespace

std::set<std::string> find_asynced_functions(const pysrc::Module& before, const pysrc::Module& after) {
  std::set<std::string> out;
  for (const auto& fn : after.functions()) {
    if (!fn.is_async) continue;
    const auto* old = before.find_function(fn.qualname);
    if (old && !old->is_async) out.insert(fn.qualname);
  }
  return out;
}

std::set<std::string> find_asynced_functions(std::string_view before, std::string_view after) {
  return find_asynced_functions(pysrc::Module::parse(std::string(before)), pysrc::Module::parse(std::string(after)));
}

bool is_test_function(std::string_view file, std::string_view qualname) {
  return fs::is_test_file(file) && terminal(qualname).starts_with("test");
}

AsyncPlan compute_async_plan(const std::set<FnKey>& asynced, const discovery::CallGraph& graph,
                             const std::filesystem::path& project_root) {
  AsyncPlan plan;
  plan.asynced = asynced;
  auto root = fs::normalize(project_root);
  auto key_of = [&](std::size_t node) {
    const auto& n = graph.node(node);
    return FnKey{fs::relative_to(n.file, root), n.qualname};
  };

  std::deque<std::size_t> queue;
  std::set<std::size_t> seen;
  for (const auto& k : asynced) {
    auto abs = fs::normalize(root / k.file).generic_string();
    auto found = graph.find(abs, k.qualname);
    std::vector<std::size_t> nodes;
    if (found) nodes.push_back(*found);
    else if (auto t = graph.find_terminal(abs, terminal(k.qualname)); t.size() == 1) nodes = t;
    for (auto n : nodes)
      if (seen.insert(n).second) queue.push_back(n);
  }

  while (!queue.empty()) {
    auto callee = queue.front();
    queue.pop_front();
    bool callee_pseudo = is_pseudo(graph.node(callee).qualname);
    auto callee_key = key_of(callee);
    for (const auto& e : graph.edges()) {
      if (e.callee != callee) continue;
      const auto& caller = graph.node(e.caller);
      if (caller.owner.kind != discovery::OwnerKind::Project) continue;
      auto caller_key = key_of(e.caller);
      auto caller_terminal = terminal(caller.qualname);
      if (caller_terminal == "<module>") {
        plan.warnings.push_back(fmt::format("ModuleLevelCallSite: {}:{} calls {} outside any function",
                                            caller_key.file, e.line, callee_key.qualname));
        continue;
      }
      if (caller_terminal == "<lambda>") {
        plan.warnings.push_back(fmt::format("ModuleLevelCallSite: {}:{} calls {} from a lambda",
                                            caller_key.file, e.line, callee_key.qualname));
        continue;
      }
      if (!callee_pseudo) plan.to_await.insert(AwaitSite{caller_key.file, e.line, caller.qualname, callee_key});
      if (!is_pseudo(caller.qualname) && !plan.asynced.count(caller_key)) plan.to_async.insert(caller_key);
      if (seen.insert(e.caller).second) queue.push_back(e.caller);
    }
  }
  return plan;
}

namespace {

// Insertions sharing an offset land in rank order: import, decorator,
// `async`, `await`.
enum Rank { kImport, kDecorator, kAsync, kAwait };

struct FileEdit {
  std::set<std::tuple<std::size_t, int, std::string>> edits;

  void insert(std::size_t offset, Rank rank, std::string text) { edits.emplace(offset, rank, std::move(text)); }

  std::vector<pysrc::Insertion> insertions() const {
    std::vector<pysrc::Insertion> out;
    for (const auto& [offset, rank, text] : edits) out.push_back({offset, text});
    return out;
  }
};

const pysrc::FunctionDef* resolve(const pysrc::Module& m, std::string_view qualname) {
  return m.resolve_function(qualname);
}

bool has_asyncio_marker(const pysrc::FunctionDef& fn) {
  for (const auto& d : fn.decorators) {
    std::string_view e = d.expression;
    if (e.starts_with("pytest.mark.asyncio") || e.starts_with("mark.asyncio") || e.starts_with("asyncio"))
      return true;
  }
  return false;
}

bool binds_pytest(const pysrc::Module& m) {
  for (const auto& b : m.imports())
    if (b.bound == "pytest" && b.module == "pytest" && !b.from_import) return true;
  return false;
}

// Before the first top-level import that is not a __future__ import; failing
// that, after a module docstring; failing that, after leading comments.
std::size_t pytest_import_offset(const pysrc::Module& m) {
  const auto& src = m.source();
  int future_line = 0;
  for (const auto& b : m.imports())
    if (b.module == "__future__") future_line = std::max(future_line, b.line);
  int best = 0;
  for (const auto& b : m.imports()) {
    if (b.module == "__future__" || b.line <= future_line) continue;
    auto off = m.line_offset(b.line);
    if (off < src.size() && (src[off] == ' ' || src[off] == '\t')) continue;
    if (best == 0 || b.line < best) best = b.line;
  }
  if (best) return m.line_offset(best);
  if (future_line) return m.line_offset(future_line + 1);

  const auto& toks = m.tokens();
  std::size_t i = 0;
  while (i < toks.size() && (toks[i].kind == pysrc::TokenKind::Comment || toks[i].kind == pysrc::TokenKind::Nl)) ++i;
  if (i < toks.size() && toks[i].kind == pysrc::TokenKind::String) {
    std::size_t j = i + 1;
    while (j < toks.size() && toks[j].kind == pysrc::TokenKind::String) ++j;
    if (j < toks.size() && toks[j].kind == pysrc::TokenKind::Newline)
      return toks[j].offset + toks[j].text.size();
  }
  if (i < toks.size()) return m.line_offset(toks[i].line);
  return src.size();
}

}  // namespace

AsyncResult apply_async_plan(const std::map<std::string, std::string>& files, const AsyncPlan& plan) {
  AsyncResult result;
  std::set<std::string> touched;
  for (const auto& k : plan.to_async) touched.insert(k.file);
  for (const auto& k : plan.asynced) touched.insert(k.file);
  for (const auto& s : plan.to_await) touched.insert(s.file);

  for (const auto& path : touched) {
    auto it = files.find(path);
    if (it == files.end()) {
      result.warnings.push_back(fmt::format("TargetNotFound: {} is not among the project files", path));
      continue;
    }
    std::optional<pysrc::Module> parsed;
    try {
      parsed = pysrc::Module::parse(it->second);
    } catch (const Error& e) {
      result.warnings.push_back(fmt::format("TargetNotFound: {}: {}", path, e.what()));
      continue;
    }
    const auto& m = *parsed;
    FileEdit fe;
    bool decorated = false;

    for (const auto& k : plan.to_async) {
      if (k.file != path) continue;
      const auto* fn = resolve(m, k.qualname);
      if (!fn) {
        result.warnings.push_back(fmt::format("TargetNotFound: function {} in {}", k.qualname, path));
        continue;
      }
      if (!fn->is_async) fe.insert(fn->def_offset, kAsync, "async ");
    }

    for (const auto& s : plan.to_await) {
      if (s.file != path) continue;
      auto name = terminal(s.callee.qualname);
      auto calls = m.calls_named(name);
      std::vector<pysrc::Call> chosen;
      const auto* caller = is_pseudo(s.caller) ? nullptr : resolve(m, s.caller);
      if (caller) {
        for (const auto& c : calls)
          if (c.enclosing == caller) chosen.push_back(c);
      } else {
        for (const auto& c : calls)
          if (c.line == s.line) chosen.push_back(c);
      }
      if (chosen.empty()) {
        result.warnings.push_back(
            fmt::format("TargetNotFound: call to {} from {} at {}:{}", name, s.caller, path, s.line));
        continue;
      }
      for (const auto& c : chosen) {
        if (!c.enclosing) {
          result.warnings.push_back(
              fmt::format("ModuleLevelCallSite: {}:{} calls {} outside any function", path, c.line, name));
          continue;
        }
        if (!c.awaited) fe.insert(m.tokens()[c.start_token].offset, kAwait, "await ");
      }
    }

    auto nl = std::string(m.newline());
    auto decorate = [&](const FnKey& k) {
      if (k.file != path || !is_test_function(k.file, k.qualname)) return;
      const auto* fn = resolve(m, k.qualname);
      if (!fn || has_asyncio_marker(*fn)) return;
      fe.insert(fn->line_offset, kDecorator, fn->indent + "@pytest.mark.asyncio" + nl);
      decorated = true;
    };
    for (const auto& k : plan.asynced) decorate(k);
    for (const auto& k : plan.to_async) decorate(k);
    if (decorated && !binds_pytest(m)) fe.insert(pytest_import_offset(m), kImport, "import pytest" + nl);
    result.decorated = result.decorated || decorated;

    if (!fe.edits.empty()) result.files.emplace(path, pysrc::apply_insertions(it->second, fe.insertions()));
  }
  return result;
}

}  // namespace libmig::asyncprop
