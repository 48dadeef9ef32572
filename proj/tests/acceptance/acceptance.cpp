// Acceptance checks 1-9. Prints one PASS/FAIL line per check and exits
// non-zero when any check fails or overruns its time budget.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "generators.hpp"
#include "libmig/asyncprop/async.hpp"
#include "libmig/common/text.hpp"
#include "libmig/discovery/call_graph.hpp"
#include "libmig/discovery/callgrind.hpp"
#include "libmig/discovery/selection.hpp"
#include "libmig/merge/merge.hpp"
#include "libmig/pipeline/pipeline.hpp"
#include "libmig/prep/test_report.hpp"
#include "libmig/report/metrics.hpp"
#include "support.hpp"

using namespace libmig;
using testsupport::fixtures;
using testsupport::slurp;

namespace {

/// Collects failures of one check.
class Check {
 public:
  void expect(bool ok, std::string what) {
    if (!ok && failures_.size() < 5) failures_.push_back(std::move(what));
    failed_ |= !ok;
  }
  bool failed() const { return failed_; }
  std::string summary() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    return s;
  }

 private:
  bool failed_ = false;
  std::vector<std::string> failures_;
};

// 1 -------------------------------------------------------------------------

void correctness_table(Check& c) {
  auto load = [](const char* stage) {
    return prep::parse_junit_xml(slurp(fixtures() / "junit" / (std::string(stage) + ".xml")), *parse_stage(stage));
  };
  auto pre = load("premig");
  struct Row {
    const char* stage;
    std::size_t num;
    const char* percent;
  };
  for (auto row : {Row{"llmmig", 1, "25.00%"}, Row{"merge", 2, "50.00%"}, Row{"async", 3, "75.00%"}}) {
    auto sc = report::compare_reports(pre, load(row.stage));
    bool exact = sc.correctness && sc.correctness->num == row.num && sc.correctness->den == 4;
    c.expect(exact, fmt::format("{}: expected {}/4, got {}", row.stage, row.num,
                                sc.correctness ? sc.correctness->exact() : "none"));
    c.expect(sc.correctness && sc.correctness->percent() == row.percent,
             fmt::format("{}: percent {}", row.stage, sc.correctness ? sc.correctness->percent() : "none"));
  }
}

// 2 -------------------------------------------------------------------------

void hunk_bands(Check& c) {
  for (std::size_t r = 0; r <= 40; ++r)
    for (std::size_t a = 0; a <= 40; ++a)
      for (bool ref : {false, true}) {
        bool want;
        if (r <= 9) want = false;
        else if (r <= 19) want = a == 0 && !ref;
        else want = 10 * r >= 9 * (r + a) && !ref;
        bool got = merge::classify_hunk(r, a, ref).verdict == merge::Verdict::Skipped;
        c.expect(got == want, fmt::format("r={} a={} ref={}: got {}", r, a, ref, got));
      }
}

// 3 -------------------------------------------------------------------------

bool is_subsequence(const std::vector<std::string>& small, const std::vector<std::string>& big) {
  std::size_t i = 0;
  for (const auto& l : big)
    if (i < small.size() && l == small[i]) ++i;
  return i == small.size();
}

void merge_round_trip(Check& c) {
  std::mt19937_64 rng(20240901);
  discovery::ImportNameSet names{"srclib", {"srclib"}};
  for (int i = 0; i < 100; ++i) {
    auto fx = testsupport::make_merge_fixture(rng);
    auto hunks = merge::classify_hunks(fx.original, fx.migrated, names);
    auto merged = merge::merge_skipped(fx.original, fx.migrated, hunks);
    std::size_t restored = 0;
    for (const auto& h : hunks)
      if (h.cls.verdict == merge::Verdict::Skipped) restored += h.hunk.old_lines.size();
    auto lm = text::split_lines(merged.text), lmig = text::split_lines(fx.migrated);
    std::size_t deleted = 0;
    for (const auto& b : fx.deleted_blocks) deleted += b.size();
    c.expect(restored == deleted, fmt::format("fixture {}: restored {} of {} deleted lines", i, restored, deleted));
    c.expect(lm.size() == lmig.size() + restored, fmt::format("fixture {}: line count not conserved", i));
    c.expect(is_subsequence(lmig, lm), fmt::format("fixture {}: migrated lines altered", i));
    c.expect(!merge::any_skipped(merge::classify_hunks(fx.original, merged.text, names)),
             fmt::format("fixture {}: re-diff still has skipped hunks", i));
  }
}

// 4 -------------------------------------------------------------------------

void async_figure(Check& c) {
  auto dir = fixtures() / "async_fig";
  std::filesystem::path root = "/fig/project";
  discovery::CallGraph g;
  auto test = g.add_node({(root / "service_test.py").string(), "test_fetch_data", {discovery::OwnerKind::Project, ""}});
  auto fetch = g.add_node({(root / "service.py").string(), "fetch_data", {discovery::OwnerKind::Project, ""}});
  auto get = g.add_node({"/venv/site-packages/requests/api.py", "get", {discovery::OwnerKind::Library, "requests"}});
  g.add_edge(test, fetch, 5);
  g.add_edge(fetch, get, 5);

  std::map<std::string, std::string> files{{"service.py", slurp(dir / "service.llmmig.py")},
                                           {"service_test.py", slurp(dir / "service_test.llmmig.py")}};
  std::set<asyncprop::FnKey> asynced;
  for (auto& q : asyncprop::find_asynced_functions(slurp(dir / "service.premig.py"), files["service.py"]))
    asynced.insert({"service.py", q});
  c.expect(asynced == std::set<asyncprop::FnKey>{{"service.py", "fetch_data"}}, "asynced set");
  auto plan = asyncprop::compute_async_plan(asynced, g, root);
  auto res = asyncprop::apply_async_plan(files, plan);
  for (auto& [p, t] : res.files) files[p] = t;
  c.expect(files["service.py"] == slurp(dir / "service.asynced.py"), "service.py differs");
  c.expect(files["service_test.py"] == slurp(dir / "service_test.asynced.py"), "service_test.py differs");
  c.expect(res.decorated, "no test decorated");
}

// 5 -------------------------------------------------------------------------

void async_closure(Check& c) {
  std::mt19937_64 rng(777);
  for (int i = 0; i < 60; ++i) {
    auto fx = testsupport::make_async_fixture(rng, 50);
    c.expect(fx.graph.nodes().size() <= 50, "graph too large");
    auto files = fx.after;
    auto plan = asyncprop::compute_async_plan(fx.asynced, fx.graph, fx.root);
    for (auto& [p, t] : asyncprop::apply_async_plan(files, plan).files) files[p] = t;
    for (const auto& v : testsupport::async_closure_violations(files, fx.graph, fx.root))
      c.expect(false, fmt::format("graph {}: {}", i, v));
    auto again = asyncprop::compute_async_plan(testsupport::async_functions(files), fx.graph, fx.root);
    c.expect(asyncprop::apply_async_plan(files, again).files.empty(), fmt::format("graph {}: not a fixpoint", i));
  }
}

// 6 -------------------------------------------------------------------------

void discovery_parity(Check& c) {
  auto project = fixtures() / "lib_use/project";
  auto site = fixtures() / "lib_use/site";
  auto text = slurp(fixtures() / "lib_use/profile.callgrind");
  for (auto [key, value] : {std::pair{"@PROJECT@", project.string()}, std::pair{"@SITE@", site.string()}})
    for (auto at = text.find(key); at != std::string::npos; at = text.find(key, at))
      text.replace(at, std::strlen(key), value);
  auto graph = discovery::build_call_graph(discovery::parse_callgrind(text), [&](std::string_view f) {
    return discovery::classify_owner(f, project, site);
  });
  auto sel = discovery::select_migration_files(project, graph, discovery::ImportNameSet{"geolib", {"geo"}});
  c.expect(sel.paths() == std::vector<std::string>{"main.py", "serialize.py"},
           fmt::format("selected {}", fmt::join(sel.paths(), ",")));
  c.expect(sel.files.size() == 2 && sel.files[0].static_hit && sel.files[1].dynamic_hit && !sel.files[1].static_hit,
           "usage kinds");
  c.expect(sel.excluded_tests == std::vector<std::string>{"serialize_test.py"}, "test file not excluded");
}

// 7 -------------------------------------------------------------------------

void callgrind_round_trip(Check& c) {
  std::size_t total = 0;
  for (const auto& entry : std::filesystem::directory_iterator(fixtures() / "callgrind")) {
    auto records = discovery::parse_callgrind(slurp(entry.path()));
    total += records.size();
    c.expect(!records.empty(), entry.path().filename().string() + ": no records");
    auto again = discovery::parse_callgrind(discovery::write_callgrind(records));
    c.expect(again == records, entry.path().filename().string() + ": round trip differs");
  }
  auto compressed = discovery::parse_callgrind(slurp(fixtures() / "callgrind/compressed.callgrind"));
  c.expect(compressed.size() == 5 && compressed[2].callee_function == "safe_load:120" &&
               compressed[4].caller_function == "main.<locals>.inner:8",
           "compressed names not expanded");
  c.expect(total >= 9, "corpus too small");
}

// 8 -------------------------------------------------------------------------

void pipeline_determinism(Check& c) {
  testsupport::MockLlm mock;
  testsupport::TempDir work("det");
  testsupport::Scenario s{"casefmt", "strcase", "textcase", "0.4.0"};
  std::vector<std::string> reports;
  for (int i = 0; i < 2; ++i) {
    auto run = testsupport::prepare_scenario(s, work.path());
    auto dir = fixtures() / "e2e" / s.name;
    mock.reply_for(slurp(dir / "project/formatting.py"), slurp(dir / "responses/formatting.py.md"));
    run.options.completion = nullptr;
    run.spec.api_base_url = mock.base_url();
    run.options.endpoint.base_url = mock.base_url();
    run.options.endpoint.model = run.spec.model_id;
    run.options.run_id = fmt::format("run-{}", i);
    auto result = pipeline::run_migration(run.spec, run.options);
    reports.push_back(slurp(result.run_dir / "run_report.json"));
  }
  c.expect(reports[0] == reports[1], "run_report.json differs between runs");
  c.expect(reports[0].find("\"correctness_percent\": \"100.00%\"") != std::string::npos, "scenario did not complete");
  c.expect(mock.requests() == 2, fmt::format("{} model requests", mock.requests()));
}

// 9 -------------------------------------------------------------------------

void effort_identity(Check& c) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> d(0, 1'000'000);
  for (int i = 0; i < 1000; ++i) {
    std::size_t a = d(rng), m = d(rng);
    if (a + m == 0) m = 1;
    auto e = report::compute_effort(a, m);
    double direct = static_cast<double>(m) / (static_cast<double>(a) + static_cast<double>(m));
    c.expect(std::abs(e.automatic + e.manual - 1.0) <= 1e-12, fmt::format("({}, {}): sum off", a, m));
    c.expect(std::abs(e.manual - direct) <= 1e-12, fmt::format("({}, {}): manual {} vs {}", a, m, e.manual, direct));
  }
}

struct Criterion {
  int id;
  const char* name;
  std::chrono::milliseconds budget;
  std::function<void(Check&)> body;
};

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  using namespace std::chrono_literals;
  std::vector<Criterion> criteria{
      {1, "correctness metric on the example table", 1s, correctness_table},
      {2, "hunk classification bands", 1s, hunk_bands},
      {3, "merge round trip on 100 random fixtures", 5s, merge_round_trip},
      {4, "async transform on the figure example", 1s, async_figure},
      {5, "async closure on random DAGs", 5s, async_closure},
      {6, "discovery on the lib-use example", 1s, discovery_parity},
      {7, "callgrind round trip", 1s, callgrind_round_trip},
      {8, "pipeline determinism", 30s, pipeline_determinism},
      {9, "effort identity", 1s, effort_identity},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    if (ms > cr.budget) check.expect(false, fmt::format("took {} ms, budget {} ms", ms.count(), cr.budget.count()));
    bool ok = !check.failed();
    failed += !ok;
    fmt::print("{} criterion {}: {} ({} ms){}\n", ok ? "PASS" : "FAIL", cr.id, cr.name, ms.count(),
               ok ? "" : " -- " + check.summary());
  }
  return failed == 0 ? 0 : 1;
}
