#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "libmig/asyncprop/async.hpp"
#include "libmig/discovery/call_graph.hpp"
#include "support.hpp"

using namespace libmig;
using namespace libmig::asyncprop;
using discovery::CallGraph;
using discovery::OwnerKind;
using testsupport::fixtures;
using testsupport::slurp;

namespace {

const std::filesystem::path kRoot = "/work/proj";

std::size_t node(CallGraph& g, const std::string& rel, const std::string& q, OwnerKind k = OwnerKind::Project) {
  auto file = rel.starts_with("<") || rel.starts_with("/") ? rel : (kRoot / rel).string();
  return g.add_node({file, q, {k, k == OwnerKind::Library ? "lib" : ""}});
}

CallGraph fig_graph() {
  CallGraph g;
  auto test = node(g, "service_test.py", "test_fetch_data");
  auto fetch = node(g, "service.py", "fetch_data");
  auto get = node(g, "/venv/site-packages/requests/api.py", "get", OwnerKind::Library);
  g.add_edge(test, fetch, 5);
  g.add_edge(fetch, get, 5);
  return g;
}

}  // namespace

TEST_CASE("asynced functions are the ones that became coroutines") {
  auto dir = fixtures() / "async_fig";
  CHECK(find_asynced_functions(slurp(dir / "service.premig.py"), slurp(dir / "service.llmmig.py")) ==
        std::set<std::string>{"fetch_data"});
  CHECK(find_asynced_functions("def a(): pass\n", "async def a(): pass\nasync def b(): pass\n") ==
        std::set<std::string>{"a"});
  CHECK(find_asynced_functions("async def a(): pass\n", "async def a(): pass\n").empty());
}

TEST_CASE("figure example end to end") {
  auto dir = fixtures() / "async_fig";
  auto plan = compute_async_plan({{"service.py", "fetch_data"}}, fig_graph(), kRoot);
  CHECK(plan.to_async == std::set<FnKey>{{"service_test.py", "test_fetch_data"}});
  REQUIRE(plan.to_await.size() == 1);
  CHECK(plan.to_await.begin()->line == 5);
  std::map<std::string, std::string> files{{"service.py", slurp(dir / "service.llmmig.py")},
                                           {"service_test.py", slurp(dir / "service_test.llmmig.py")}};
  auto res = apply_async_plan(files, plan);
  CHECK(res.decorated);
  CHECK(res.files.size() == 1);
  CHECK(res.files.at("service_test.py") == slurp(dir / "service_test.asynced.py"));

  files["service_test.py"] = res.files.at("service_test.py");
  CHECK(apply_async_plan(files, plan).files.empty());
}

TEST_CASE("transitive callers, methods and pseudo frames") {
  CallGraph g;
  auto leaf = node(g, "a.py", "Client.get");
  auto mid = node(g, "a.py", "Client.fetch_all");
  auto comp = node(g, "b.py", "<listcomp>");
  auto top = node(g, "b.py", "run");
  auto mod = node(g, "c.py", "<module>");
  g.add_edge(mid, leaf, 7);
  g.add_edge(comp, mid, 2);
  g.add_edge(top, comp, 2);
  g.add_edge(mod, top, 2);
  auto plan = compute_async_plan({{"a.py", "Client.get"}}, g, kRoot);
  CHECK(plan.to_async == std::set<FnKey>{{"a.py", "Client.fetch_all"}, {"b.py", "run"}});
  CHECK(plan.warnings.size() == 1);
  CHECK(plan.warnings[0].starts_with("ModuleLevelCallSite:"));

  std::map<std::string, std::string> files{
      {"a.py",
       "class Client:\n    async def get(self, u):\n        return u\n\n    def fetch_all(self, us):\n"
       "        out = []\n        out.append(self.get(us[0]))\n        return out\n"},
      {"b.py", "def run(c):\n    return [c.fetch_all(x) for x in [1]]\n"}};
  auto res = apply_async_plan(files, plan);
  CHECK(res.files.at("a.py").find("    async def fetch_all(self, us):\n") != std::string::npos);
  CHECK(res.files.at("a.py").find("out.append(await self.get(us[0]))") != std::string::npos);
  CHECK(res.files.at("b.py") == "async def run(c):\n    return [await c.fetch_all(x) for x in [1]]\n");
  CHECK_FALSE(res.decorated);
}

TEST_CASE("unknown targets are reported, not invented") {
  CallGraph g;
  node(g, "a.py", "other");
  auto plan = compute_async_plan({{"a.py", "missing"}}, g, kRoot);
  CHECK(plan.to_async.empty());
  CHECK(plan.to_await.empty());

  AsyncPlan ghost;
  ghost.to_async = {{"a.py", "ghost"}, {"gone.py", "f"}};
  auto res = apply_async_plan({{"a.py", "def other():\n    pass\n"}}, ghost);
  CHECK(res.files.empty());
  REQUIRE(res.warnings.size() == 2);
  for (const auto& w : res.warnings) CHECK(w.starts_with("TargetNotFound:"));
}

TEST_CASE("decorators respect existing markers and future imports") {
  CallGraph g;
  auto t = node(g, "tests/test_x.py", "test_one");
  auto f = node(g, "x.py", "f");
  g.add_edge(t, f, 6);
  auto plan = compute_async_plan({{"x.py", "f"}}, g, kRoot);
  std::map<std::string, std::string> files{
      {"x.py", "async def f():\n    return 1\n"},
      {"tests/test_x.py",
       "\"\"\"Doc.\"\"\"\nfrom __future__ import annotations\n\n\n@pytest.mark.asyncio\ndef test_one():\n"
       "    assert f() == 1\n"}};
  auto res = apply_async_plan(files, plan);
  CHECK(res.files.at("tests/test_x.py") ==
        "\"\"\"Doc.\"\"\"\nfrom __future__ import annotations\n\n\n@pytest.mark.asyncio\nasync def test_one():\n"
        "    assert await f() == 1\n");

  files["tests/test_x.py"] = "\"\"\"Doc.\"\"\"\nfrom __future__ import annotations\n\n\ndef test_one():\n"
                             "    assert f() == 1\n";
  g = CallGraph{};
  t = node(g, "tests/test_x.py", "test_one");
  f = node(g, "x.py", "f");
  g.add_edge(t, f, 6);
  plan = compute_async_plan({{"x.py", "f"}}, g, kRoot);
  res = apply_async_plan(files, plan);
  CHECK(res.decorated);
  CHECK(res.files.at("tests/test_x.py") ==
        "\"\"\"Doc.\"\"\"\nfrom __future__ import annotations\nimport pytest\n\n\n@pytest.mark.asyncio\n"
        "async def test_one():\n    assert await f() == 1\n");
  CHECK(is_test_function("tests/test_x.py", "test_one"));
  CHECK(is_test_function("a_test.py", "TestCase.test_it"));
  CHECK_FALSE(is_test_function("x.py", "test_one"));
  CHECK_FALSE(is_test_function("test_x.py", "helper"));
}

TEST_CASE("closure holds on random call graphs") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 40; ++round) {
    auto fx = testsupport::make_async_fixture(rng, 50);
    auto plan = compute_async_plan(fx.asynced, fx.graph, fx.root);
    auto res = apply_async_plan(fx.after, plan);
    auto files = fx.after;
    for (auto& [p, t] : res.files) files[p] = t;
    auto violations = testsupport::async_closure_violations(files, fx.graph, fx.root);
    std::string joined;
    for (const auto& v : violations) joined += v + "\n";
    CHECK_MESSAGE(violations.empty(), joined);

    auto again = compute_async_plan(testsupport::async_functions(files), fx.graph, fx.root);
    CHECK(apply_async_plan(files, again).files.empty());
  }
}
