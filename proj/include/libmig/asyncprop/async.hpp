#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "libmig/discovery/call_graph.hpp"
#include "libmig/pysrc/module.hpp"

namespace libmig::asyncprop {

/// A function by project-relative file and qualname.
struct FnKey {
  std::string file;
  std::string qualname;

  auto operator<=>(const FnKey&) const = default;
};

/// Qualnames defined `async` in `after` that exist in `before` as plain
/// functions. Functions new in `after` do not count.
std::set<std::string> find_asynced_functions(const pysrc::Module& before, const pysrc::Module& after);
std::set<std::string> find_asynced_functions(std::string_view before, std::string_view after);

struct AwaitSite {
  std::string file;     // caller's file
  int line;             // recorded call-site line
  std::string caller;   // caller qualname
  FnKey callee;

  auto operator<=>(const AwaitSite&) const = default;
};

struct AsyncPlan {
  std::set<FnKey> asynced;
  std::set<FnKey> to_async;
  std::set<AwaitSite> to_await;
  std::vector<std::string> warnings;

  bool empty() const { return to_async.empty() && to_await.empty() && asynced.empty(); }
};

/// Walks project-owned callers of `asynced` through the graph to a fixpoint.
/// Pseudo-frames (`<listcomp>`, `<genexpr>`, ...) are walked through without
/// becoming async themselves; calls from module level are reported.
AsyncPlan compute_async_plan(const std::set<FnKey>& asynced, const discovery::CallGraph& graph,
                             const std::filesystem::path& project_root);

struct AsyncResult {
  std::map<std::string, std::string> files;  // only the files that changed
  std::vector<std::string> warnings;
  bool decorated = false;  // an asyncio test marker was added
};

/// Adds `async` to to_async definitions, `await` to the matching calls in each
/// caller's body and `@pytest.mark.asyncio` above test functions that are now
/// coroutines. Insert-only edits; applying twice changes nothing further.
AsyncResult apply_async_plan(const std::map<std::string, std::string>& files, const AsyncPlan& plan);

bool is_test_function(std::string_view file, std::string_view qualname);

}  // namespace libmig::asyncprop
